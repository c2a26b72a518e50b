//! Exact detection and guessing probabilities, obtained by enumerating
//! decoy states and adversary choices on the state-vector engine.

use super::{AdversaryError, AttackDescriptor, BasisPolicy};
use crate::protocol::{epr_encode_bid, Bid, Permutation};
use crate::quantum::{prepare_bell, CanonicalState};

/// Attacks whose effect on a single decoy has a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionModel {
    PassThrough,
    Cnot,
    InterceptResend(BasisPolicy),
}

impl TryFrom<&AttackDescriptor> for DetectionModel {
    type Error = AdversaryError;

    fn try_from(attack: &AttackDescriptor) -> Result<Self, Self::Error> {
        match attack {
            AttackDescriptor::PassThrough { .. } => Ok(DetectionModel::PassThrough),
            AttackDescriptor::Cnot { .. } => Ok(DetectionModel::Cnot),
            AttackDescriptor::InterceptResend { basis_policy, .. } => {
                Ok(DetectionModel::InterceptResend(*basis_policy))
            }
            other => Err(AdversaryError::Unsupported(other.name().to_string())),
        }
    }
}

/// Probability that one uniformly drawn decoy, after the attack, gives the
/// wrong outcome in its announced basis.
pub fn per_decoy_detection(model: DetectionModel) -> Result<f64, AdversaryError> {
    let weight = 1.0 / CanonicalState::DECOYS.len() as f64;
    let mut total = 0.0;
    for decoy in CanonicalState::DECOYS {
        let wrong = 1 - decoy.outcome() as usize;
        let p = match model {
            DetectionModel::PassThrough => decoy.vector().probabilities(0, decoy.basis())?[wrong],
            DetectionModel::Cnot => decoy
                .vector()
                .tensor(&CanonicalState::Zero.vector())
                .apply_cnot(0, 1)?
                .probabilities(0, decoy.basis())?[wrong],
            DetectionModel::InterceptResend(policy) => {
                let mut p = 0.0;
                for (basis, w) in policy.choices() {
                    let eve = decoy.vector().probabilities(0, basis)?;
                    for (outcome, q) in eve.iter().enumerate() {
                        let resent = basis.eigenstate(outcome as u8).vector();
                        p += w * q * resent.probabilities(0, decoy.basis())?[wrong];
                    }
                }
                p
            }
        };
        total += weight * p;
    }
    Ok(total)
}

/// Probability that at least one of `d` independently attacked decoys
/// reveals the attack: `1 - (1 - p)^d`.
pub fn analytic_detection(attack: &AttackDescriptor, d: usize) -> Result<f64, AdversaryError> {
    let p = per_decoy_detection(DetectionModel::try_from(attack)?)?;
    Ok(1.0 - (1.0 - p).powi(d as i32))
}

/// Probability that Bell-measuring aligned pairs of a permuted EPR sequence,
/// without undoing the permutation, reproduces `bid` exactly.
pub fn disordered_guess_probability(
    bid: &Bid,
    permutation: &Permutation,
) -> Result<f64, AdversaryError> {
    let labels = epr_encode_bid(bid)?;
    let ordered = labels
        .iter()
        .map(|l| prepare_bell(*l))
        .reduce(|a, b| a.tensor(&b))
        .expect("bids are non-empty");
    let held = permutation.apply_state(&ordered)?;
    // the aligned-pair projectors cover every qubit, so one overlap suffices
    Ok(ordered.inner(&held)?.norm_sqr())
}
