//! Seeded Monte Carlo over many auctions, with aggregate statistics,
//! qubit-efficiency accounting and machine-readable reports.

mod efficiency;
mod report;
mod stats;

pub use efficiency::{efficiency_report, table2, EfficiencyRow, ProtocolFamily, ResourceCount};
pub use report::{emit_report, render_report, Report, ReportFormat, REPORT_SCHEMA_VERSION};
pub use stats::{
    run_trials, run_trials_seeded, sweep_decoys, wilson_interval, Rate, RunStatistics, SweepPoint,
    Z_99,
};

use thiserror::Error;

use crate::adversary::AdversaryError;
use crate::protocol::ProtocolError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("decoy sweep needs at least one decoy count")]
    EmptySweep,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
