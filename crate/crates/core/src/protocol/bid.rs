use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ProtocolError;

/// A bid as a big-endian bit string (leftmost bit most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bid(Vec<bool>);

impl Bid {
    pub fn new(bits: Vec<bool>) -> Result<Self, ProtocolError> {
        if bits.is_empty() {
            return Err(ProtocolError::InvalidBid("empty bid".to_string()));
        }
        Ok(Bid(bits))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self, ProtocolError> {
        Bid::new((0..len).map(|_| rng.gen()).collect())
    }

    /// All bids of the given length in increasing numeric order.
    pub fn all(len: usize) -> impl Iterator<Item = Bid> {
        assert!(len > 0 && len < 32, "enumeration is for small bids only");
        (0u32..1 << len).map(move |v| Bid((0..len).rev().map(|k| v >> k & 1 == 1).collect()))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positions where two equal-length bids differ.
    pub fn hamming(&self, other: &Bid) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    fn significant(&self) -> &[bool] {
        let start = self.0.iter().position(|b| *b).unwrap_or(self.0.len());
        &self.0[start..]
    }
}

/// Numeric order of the unsigned integers the bit strings spell; equal
/// values with different padding order by length.
impl Ord for Bid {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.significant(), other.significant());
        a.len()
            .cmp(&b.len())
            .then_with(|| a.cmp(b))
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for Bid {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bid {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ProtocolError::InvalidBid(format!(
                    "{s:?} contains {other:?}; bids are strings of 0 and 1"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Bid::new(bits)
    }
}

impl Serialize for Bid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
