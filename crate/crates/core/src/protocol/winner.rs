use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Bid, PartyId, ProtocolError};

/// What to do when several bidders share the highest bid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Announce no winner.
    #[default]
    Abort,
    /// Award the tied bidder with the lowest index.
    LowestId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WinnerDecision {
    Winner(PartyId, Bid),
    Tie(Vec<PartyId>, Bid),
}

pub fn determine_winner(
    decoded: &BTreeMap<PartyId, Bid>,
    policy: TiePolicy,
) -> Result<WinnerDecision, ProtocolError> {
    let highest = decoded.values().max().ok_or(ProtocolError::NoBids)?.clone();
    // BTreeMap iteration is in party order, so the first is the lowest id
    let leaders: Vec<PartyId> = decoded
        .iter()
        .filter(|(_, b)| **b == highest)
        .map(|(p, _)| *p)
        .collect();
    match (leaders.as_slice(), policy) {
        ([only], _) | ([only, ..], TiePolicy::LowestId) => {
            Ok(WinnerDecision::Winner(*only, highest))
        }
        _ => Ok(WinnerDecision::Tie(leaders, highest)),
    }
}
