//! Simulator for a multiparty quantum sealed-bid auction in which single
//! photons carry the bids, decoy photons guard every quantum channel, and
//! permuted EPR pairs let losing bidders confirm the announced winner.

pub mod adversary;
pub mod harness;
pub mod protocol;
pub mod quantum;
pub mod scenario;
pub mod seed;

pub use adversary::{AttackDescriptor, BasisPolicy, Channel};
pub use harness::{run_trials, Report, ReportFormat, RunStatistics};
pub use protocol::{
    run_auction, run_auction_seeded, AuctionOutcome, Bid, PartyId, Permutation, Transcript, Verdict,
};
pub use quantum::{Basis, BellLabel, CanonicalState, StateVector};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};
