use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const BIDDER_NAMES: [&str; 9] = [
    "Bob", "Charlie", "Dave", "Erin", "Frank", "Grace", "Heidi", "Ivan", "Judy",
];

/// A protocol participant. Bidders are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartyId {
    Auctioneer,
    Bidder(usize),
}

impl PartyId {
    pub fn name(self) -> String {
        match self {
            PartyId::Auctioneer => "Alice".to_string(),
            PartyId::Bidder(j) => match BIDDER_NAMES.get(j.wrapping_sub(1)) {
                Some(name) => name.to_string(),
                None => format!("Bidder{j}"),
            },
        }
    }

    pub fn bidder_index(self) -> Option<usize> {
        match self {
            PartyId::Auctioneer => None,
            PartyId::Bidder(j) => Some(j),
        }
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for PartyId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "Alice" {
            return Ok(PartyId::Auctioneer);
        }
        if let Some(pos) = BIDDER_NAMES.iter().position(|n| *n == s) {
            return Ok(PartyId::Bidder(pos + 1));
        }
        s.strip_prefix("Bidder")
            .and_then(|n| n.parse().ok())
            .filter(|j| *j > BIDDER_NAMES.len())
            .map(PartyId::Bidder)
            .ok_or_else(|| format!("unknown party {s:?}"))
    }
}

impl Serialize for PartyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for PartyId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
