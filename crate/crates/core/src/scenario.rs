//! Scenario documents: one JSON object describing an auction configuration,
//! optionally with an attack and with fixed carriers and permutations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adversary::AttackDescriptor;
use crate::protocol::{check_bid_length, Bid, CarrierStates, DecoyPolicy, Permutation, TiePolicy};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

const EXAMPLE3: &str = include_str!("../scenarios/example3.json");

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKeyword {
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BidSource {
    Explicit(Vec<Bid>),
    /// Every run draws fresh uniform bids.
    Random(RandomKeyword),
}

/// How bidders pick their EPR permutation when none is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationPolicy {
    /// Uniform over orderings where no aligned pair holds EPR partners.
    #[default]
    PairSplitting,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    /// Auctioneer plus bidders.
    pub n_parties: usize,
    /// Bits per bid.
    pub bid_length: usize,
    pub bids: BidSource,
    /// Decoys per carrier sequence as a fraction of the bid length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoy_rate: Option<f64>,
    /// Decoys per carrier sequence as an absolute count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoy_count: Option<usize>,
    /// Largest tolerated fraction of failed decoys.
    #[serde(default)]
    pub error_threshold: f64,
    #[serde(default)]
    pub tie_policy: TiePolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carriers: Option<Vec<CarrierStates>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<Vec<Permutation>>,
    #[serde(default)]
    pub permutation_policy: PermutationPolicy,
    #[serde(default)]
    pub seed: u64,
    /// Adds raw amplitudes to quantum payloads in transcripts.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub debug: bool,
}

impl Scenario {
    /// Three-party worked example: bids 1011 and 0111, carriers
    /// "0 1 + -" and "+ 0 - 1", permutation orders 1324 and 4123.
    pub fn example3() -> Scenario {
        parse_scenario(EXAMPLE3).expect("bundled scenario is valid")
    }

    pub fn example3_json() -> &'static str {
        EXAMPLE3
    }

    pub fn bidder_count(&self) -> usize {
        self.n_parties.saturating_sub(1)
    }

    pub fn decoy_policy(&self) -> Result<DecoyPolicy, ScenarioError> {
        match (self.decoy_rate, self.decoy_count) {
            (Some(k), None) => Ok(DecoyPolicy::Rate(k)),
            (None, Some(d)) => Ok(DecoyPolicy::Count(d)),
            (None, None) => Err(invalid(
                "decoy_rate",
                "one of decoy_rate or decoy_count is required",
            )),
            (Some(_), Some(_)) => Err(invalid(
                "decoy_count",
                "decoy_rate and decoy_count are mutually exclusive",
            )),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCENARIO_SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if self.n_parties < 3 {
            return Err(invalid(
                "n_parties",
                "an auction needs an auctioneer and at least two bidders",
            ));
        }
        let m = self.bid_length;
        if check_bid_length(m).is_err() {
            return Err(invalid(
                "bid_length",
                "bid_length must be even and at least 2",
            ));
        }
        let bidders = self.bidder_count();
        if let BidSource::Explicit(bids) = &self.bids {
            if bids.len() != bidders {
                return Err(invalid(
                    "bids",
                    format!(
                        "{} bids given for {bidders} bidders (n_parties - 1)",
                        bids.len()
                    ),
                ));
            }
            for (k, b) in bids.iter().enumerate() {
                if b.len() != m {
                    return Err(invalid(
                        format!("bids[{k}]"),
                        format!("length {}, expected {m}", b.len()),
                    ));
                }
            }
        }
        self.decoy_policy()?.decoys_for(m).map_err(|e| {
            invalid(
                if self.decoy_rate.is_some() {
                    "decoy_rate"
                } else {
                    "decoy_count"
                },
                e.to_string(),
            )
        })?;
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(invalid("error_threshold", "must lie in [0, 1]"));
        }
        if let Some(carriers) = &self.carriers {
            if carriers.len() != bidders {
                return Err(invalid(
                    "carriers",
                    format!("{} sequences given for {bidders} bidders", carriers.len()),
                ));
            }
            for (k, c) in carriers.iter().enumerate() {
                if c.0.len() != m {
                    return Err(invalid(
                        format!("carriers[{k}]"),
                        format!("length {}, expected {m}", c.0.len()),
                    ));
                }
            }
        }
        if let Some(perms) = &self.permutations {
            if perms.len() != bidders {
                return Err(invalid(
                    "permutations",
                    format!("{} permutations given for {bidders} bidders", perms.len()),
                ));
            }
            for (k, p) in perms.iter().enumerate() {
                if p.len() != m {
                    return Err(invalid(
                        format!("permutations[{k}]"),
                        format!("length {}, expected {m}", p.len()),
                    ));
                }
            }
        }
        if let Some(attack) = &self.attack {
            self.validate_attack(attack)?;
        }
        Ok(())
    }

    fn validate_attack(&self, attack: &AttackDescriptor) -> Result<(), ScenarioError> {
        let bidders = self.bidder_count();
        let check_bidder = |field: &str, j: usize| {
            if j == 0 || j > bidders {
                Err(invalid(
                    format!("attack.{field}"),
                    format!("bidder {j} outside 1..={bidders}"),
                ))
            } else {
                Ok(())
            }
        };
        if let Some((_, _, targets)) = attack.tap() {
            if targets.is_empty() {
                return Err(invalid(
                    "attack.targets",
                    "at least one target bidder is required",
                ));
            }
            for &t in targets {
                check_bidder("targets", t)?;
            }
        }
        match attack {
            AttackDescriptor::FalseAnnouncement {
                winner,
                fabricated_bid,
            } => {
                check_bidder("winner", *winner)?;
                if fabricated_bid.len() != self.bid_length {
                    return Err(invalid(
                        "attack.fabricated_bid",
                        format!(
                            "length {}, expected {}",
                            fabricated_bid.len(),
                            self.bid_length
                        ),
                    ));
                }
            }
            AttackDescriptor::Collusion { colluders } => {
                if colluders.is_empty() {
                    return Err(invalid(
                        "attack.colluders",
                        "at least one colluder is required",
                    ));
                }
                if colluders.len() >= bidders {
                    return Err(invalid(
                        "attack.colluders",
                        "at least one bidder must stay honest",
                    ));
                }
                for &c in colluders {
                    check_bidder("colluders", c)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Compact JSON with fields in declaration order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenarios serialize")
    }

    /// SHA-256 of [`Scenario::canonical_json`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = serde_json::from_str(text)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}
