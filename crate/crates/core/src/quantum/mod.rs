//! Exact pure-state quantum engine: canonical states, the protocol's gates,
//! basis and Bell measurements, and a factored run-wide register.

mod bell;
mod state;
mod store;

pub use bell::{bell_measure, prepare_bell, BellLabel};
pub use state::{Basis, CanonicalState, Gate, StateVector, NORM_TOLERANCE};
pub use store::{QubitId, QubitStore};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("cannot build a state from an empty sequence")]
    EmptySequence,
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("{0} is not a single-qubit gate")]
    NotSingleQubit(Gate),
    #[error("qubit {0} used twice in a two-qubit operation")]
    SameQubit(usize),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid amplitudes: {0}")]
    InvalidAmplitudes(String),
    #[error("unknown state label {0:?}")]
    UnknownLabel(String),
    #[error("invalid qubit permutation {0}")]
    InvalidPermutation(String),
    #[error("qubit {0} is not in a product state with the rest of its register")]
    NotSeparable(usize),
    #[error("qubit {0} does not belong to this store")]
    UnknownQubit(usize),
    #[error("requested qubits are entangled with qubit {0} outside the selection")]
    NotIsolated(usize),
}
