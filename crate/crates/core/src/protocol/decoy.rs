//! Decoy-photon insertion and the channel check run after each quantum
//! transmission.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::quantum::{Basis, CanonicalState, QubitId, QubitStore};

/// How many decoys accompany a transmitted carrier sequence of length m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyPolicy {
    /// `ceil(K * m)` decoys for a detection rate K in (0, 1].
    Rate(f64),
    /// A fixed count per sequence, independent of m.
    Count(usize),
}

impl DecoyPolicy {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        match *self {
            DecoyPolicy::Rate(k) if !(k > 0.0 && k <= 1.0) => Err(
                ProtocolError::InvalidDecoyPolicy(format!("decoy rate {k} must lie in (0, 1]")),
            ),
            DecoyPolicy::Count(0) => Err(ProtocolError::InvalidDecoyPolicy(
                "decoy count must be at least 1".to_string(),
            )),
            _ => Ok(()),
        }
    }

    pub fn decoys_for(&self, m: usize) -> Result<usize, ProtocolError> {
        self.validate()?;
        let d = match *self {
            // the epsilon keeps e.g. 0.3 * 10 from rounding up to 4
            DecoyPolicy::Rate(k) => (k * m as f64 - 1e-9).ceil() as usize,
            DecoyPolicy::Count(d) => d,
        };
        if d == 0 {
            return Err(ProtocolError::InvalidDecoyPolicy(format!(
                "policy {self:?} yields no decoys for m = {m}"
            )));
        }
        Ok(d)
    }
}

/// A decoy the sender inserted, kept private until the check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoyRecord {
    pub position: usize,
    pub state: CanonicalState,
    pub basis: Basis,
}

impl DecoyRecord {
    pub fn new(position: usize, state: CanonicalState) -> Result<Self, ProtocolError> {
        if !state.is_decoy() {
            return Err(ProtocolError::InvalidDecoyState(state));
        }
        Ok(DecoyRecord {
            position,
            state,
            basis: state.basis(),
        })
    }
}

/// Places `d` fresh decoys at uniformly random distinct positions of the
/// augmented sequence; data qubits keep their relative order.
pub fn insert_decoys<R: Rng + ?Sized>(
    store: &mut QubitStore,
    data: &[QubitId],
    d: usize,
    rng: &mut R,
) -> (Vec<QubitId>, Vec<DecoyRecord>) {
    let total = data.len() + d;
    let mut positions = sample(rng, total, d).into_vec();
    positions.sort_unstable();
    let mut records = Vec::with_capacity(d);
    let mut augmented = Vec::with_capacity(total);
    let mut data_iter = data.iter();
    let mut next = positions.iter().peekable();
    for pos in 0..total {
        if next.peek() == Some(&&pos) {
            next.next();
            let state = CanonicalState::DECOYS[rng.gen_range(0..4)];
            augmented.push(store.prepare(state));
            records.push(DecoyRecord::new(pos, state).expect("drawn from the decoy set"));
        } else {
            augmented.push(*data_iter.next().expect("enough data qubits"));
        }
    }
    (augmented, records)
}

/// Drops the recorded decoy positions, returning the data qubits in order.
pub fn strip_decoys<T: Copy>(augmented: &[T], records: &[DecoyRecord]) -> Vec<T> {
    augmented
        .iter()
        .enumerate()
        .filter(|(i, _)| !records.iter().any(|r| r.position == *i))
        .map(|(_, q)| *q)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoyCheck {
    pub checked: usize,
    pub mismatches: usize,
    pub error_rate: f64,
    pub pass: bool,
    /// Receiver's outcomes, in record order.
    pub results: Vec<u8>,
}

/// The receiver measures every decoy in its announced basis and the two
/// sides compare outcomes in public.
pub fn run_decoy_check<R: Rng + ?Sized>(
    store: &mut QubitStore,
    augmented: &[QubitId],
    records: &[DecoyRecord],
    threshold: f64,
    rng: &mut R,
) -> Result<DecoyCheck, ProtocolError> {
    if records.is_empty() {
        return Err(ProtocolError::NoDecoys);
    }
    let mut results = Vec::with_capacity(records.len());
    let mut mismatches = 0;
    for rec in records {
        let qubit = *augmented
            .get(rec.position)
            .ok_or(ProtocolError::LengthMismatch {
                what: "decoy position",
                expected: augmented.len(),
                found: rec.position,
            })?;
        let outcome = store.measure(qubit, rec.basis, rng)?;
        if outcome != rec.state.outcome() {
            mismatches += 1;
        }
        results.push(outcome);
    }
    let error_rate = mismatches as f64 / records.len() as f64;
    Ok(DecoyCheck {
        checked: records.len(),
        mismatches,
        error_rate,
        pass: error_rate <= threshold,
        results,
    })
}
