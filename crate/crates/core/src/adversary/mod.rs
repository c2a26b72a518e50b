//! Channel taps and dishonest-party behaviors, plus exact per-decoy
//! detection probabilities to hold the Monte Carlo runs against.

mod analytic;
mod dishonest;
mod tap;

pub use analytic::{
    analytic_detection, disordered_guess_probability, per_decoy_detection, DetectionModel,
};
pub use dishonest::{
    collusion_measure_disordered, false_announcement, CollusionGuess, DishonestBehavior,
};
pub use tap::{cnot_ancilla, intercept_resend, ChannelTap, InterceptNote, TapBehavior};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::Bid;
use crate::quantum::Basis;

/// How an intercept-resend adversary picks the basis for each qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    FixedZ,
    FixedX,
    UniformXy,
    UniformZxy,
}

impl BasisPolicy {
    /// Bases the policy may pick, each with its probability.
    pub fn choices(self) -> Vec<(Basis, f64)> {
        match self {
            BasisPolicy::FixedZ => vec![(Basis::Z, 1.0)],
            BasisPolicy::FixedX => vec![(Basis::X, 1.0)],
            BasisPolicy::UniformXy => vec![(Basis::X, 0.5), (Basis::Y, 0.5)],
            BasisPolicy::UniformZxy => Basis::ALL.iter().map(|b| (*b, 1.0 / 3.0)).collect(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> Basis {
        match self {
            BasisPolicy::FixedZ => Basis::Z,
            BasisPolicy::FixedX => Basis::X,
            BasisPolicy::UniformXy => [Basis::X, Basis::Y][rng.gen_range(0..2)],
            BasisPolicy::UniformZxy => Basis::ALL[rng.gen_range(0..3)],
        }
    }
}

/// Quantum transmission edge a tap sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Channel {
    /// Auctioneer to bidder, carriers plus decoys.
    #[default]
    S2,
    /// Bidder to bidder, permuted EPR halves plus decoys.
    S5,
    /// Bidder back to auctioneer, encoded carriers (no decoys).
    S6,
}

fn default_targets() -> Vec<usize> {
    vec![1]
}

/// Attack entry of a scenario file. `targets` are the bidders whose
/// traffic on `channel` the tap sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "attack", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackDescriptor {
    PassThrough {
        #[serde(default = "default_targets")]
        targets: Vec<usize>,
        #[serde(default)]
        channel: Channel,
    },
    Cnot {
        #[serde(default = "default_targets")]
        targets: Vec<usize>,
        #[serde(default)]
        channel: Channel,
    },
    InterceptResend {
        basis_policy: BasisPolicy,
        #[serde(default = "default_targets")]
        targets: Vec<usize>,
        #[serde(default)]
        channel: Channel,
    },
    FalseAnnouncement {
        winner: usize,
        fabricated_bid: Bid,
    },
    Collusion {
        colluders: Vec<usize>,
    },
}

impl AttackDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            AttackDescriptor::PassThrough { .. } => "pass_through",
            AttackDescriptor::Cnot { .. } => "cnot",
            AttackDescriptor::InterceptResend { .. } => "intercept_resend",
            AttackDescriptor::FalseAnnouncement { .. } => "false_announcement",
            AttackDescriptor::Collusion { .. } => "collusion",
        }
    }

    /// The channel tap this attack installs, if any.
    pub fn tap(&self) -> Option<(TapBehavior, Channel, &[usize])> {
        match self {
            AttackDescriptor::PassThrough { targets, channel } => {
                Some((TapBehavior::PassThrough, *channel, targets))
            }
            AttackDescriptor::Cnot { targets, channel } => {
                Some((TapBehavior::CnotAncilla, *channel, targets))
            }
            AttackDescriptor::InterceptResend {
                basis_policy,
                targets,
                channel,
            } => Some((
                TapBehavior::InterceptResend(*basis_policy),
                *channel,
                targets,
            )),
            _ => None,
        }
    }

    pub fn dishonest(&self) -> Option<DishonestBehavior> {
        use crate::protocol::PartyId;
        match self {
            AttackDescriptor::FalseAnnouncement {
                winner,
                fabricated_bid,
            } => Some(DishonestBehavior::FalseAnnouncement {
                winner: PartyId::Bidder(*winner),
                fabricated: fabricated_bid.clone(),
            }),
            AttackDescriptor::Collusion { colluders } => {
                Some(DishonestBehavior::CollusionMeasureDisordered {
                    colluders: colluders.iter().map(|c| PartyId::Bidder(*c)).collect(),
                })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdversaryError {
    #[error("no closed-form detection probability for attack {0:?}")]
    Unsupported(String),
    #[error(transparent)]
    Quantum(#[from] crate::quantum::QuantumError),
    #[error(transparent)]
    Protocol(#[from] crate::protocol::ProtocolError),
}
