//! The seven-step auction: carrier distribution with decoys, channel checks,
//! bid encoding, permuted EPR copies, decoding and announcement, and
//! post-confirmation.

mod bid;
mod carrier;
mod decoy;
mod engine;
mod epr;
mod party;
mod permutation;
mod transcript;
mod winner;

pub use bid::Bid;
pub use carrier::{
    check_bid_length, decode_bid, decode_bid_state, encode_bid, encode_bid_state, prepare_carriers,
    CarrierSequence, CarrierStates,
};
pub use decoy::{
    insert_decoys, run_decoy_check, strip_decoys, DecoyCheck, DecoyPolicy, DecoyRecord,
};
pub use engine::{run_auction, run_auction_seeded, AuctionOutcome, CheckSummary, Verdict};
pub use epr::{
    epr_decode, epr_encode_bid, post_confirm, recover_bid, EprSequence, PostConfirmation,
};
pub use party::PartyId;
pub use permutation::Permutation;
pub use transcript::{Event, EventKind, Step, Transcript};
pub use winner::{determine_winner, TiePolicy, WinnerDecision};

use crate::quantum::{CanonicalState, QuantumError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("bid_length must be even and at least 2 (got {0})")]
    InvalidBidLength(usize),
    #[error("invalid bid: {0}")]
    InvalidBid(String),
    #[error("{what} length mismatch: expected {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid decoy policy: {0}")]
    InvalidDecoyPolicy(String),
    #[error("{0} is not a decoy state")]
    InvalidDecoyState(CanonicalState),
    #[error("{0} is not a carrier state")]
    InvalidCarrierState(CanonicalState),
    #[error("a channel check needs at least one decoy")]
    NoDecoys,
    #[error("no bids to compare")]
    NoBids,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
