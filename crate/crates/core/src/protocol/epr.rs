//! Bell-pair copies of each bid, hidden behind a secret permutation until
//! the winner reveals it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Bid, PartyId, Permutation, ProtocolError};
use crate::quantum::{BellLabel, QubitId, QubitStore};

/// Splits a bid into consecutive 2-bit chunks: 00 → psi+, 01 → psi-,
/// 10 → phi+, 11 → phi-.
pub fn epr_encode_bid(bid: &Bid) -> Result<Vec<BellLabel>, ProtocolError> {
    if !bid.len().is_multiple_of(2) {
        return Err(ProtocolError::InvalidBidLength(bid.len()));
    }
    Ok(bid
        .bits()
        .chunks_exact(2)
        .map(|c| BellLabel::from_code(c[0], c[1]))
        .collect())
}

pub fn epr_decode(labels: &[BellLabel]) -> Result<Bid, ProtocolError> {
    Bid::new(labels.iter().flat_map(|l| l.code()).collect())
}

/// EPR sequence prepared by `owner` for `target`; `qubits` is in the
/// permuted (transmitted) order.
#[derive(Debug, Clone)]
pub struct EprSequence {
    pub owner: PartyId,
    pub target: PartyId,
    pub labels: Vec<BellLabel>,
    pub permutation: Permutation,
    pub qubits: Vec<QubitId>,
}

impl EprSequence {
    pub fn prepare(
        store: &mut QubitStore,
        owner: PartyId,
        target: PartyId,
        labels: Vec<BellLabel>,
        permutation: Permutation,
    ) -> Result<Self, ProtocolError> {
        let ordered: Vec<QubitId> = labels.iter().flat_map(|l| store.prepare_bell(*l)).collect();
        let qubits = permutation.apply(&ordered)?;
        Ok(EprSequence {
            owner,
            target,
            labels,
            permutation,
            qubits,
        })
    }
}

/// Bell-measures positions (2g, 2g+1) after undoing `permutation` (or as
/// held, when none is known) and concatenates the codes.
pub fn recover_bid<R: Rng + ?Sized>(
    store: &mut QubitStore,
    qubits: &[QubitId],
    permutation: Option<&Permutation>,
    rng: &mut R,
) -> Result<Bid, ProtocolError> {
    let ordered = match permutation {
        Some(p) => p.invert().apply(qubits)?,
        None => qubits.to_vec(),
    };
    if ordered.len() % 2 != 0 || ordered.is_empty() {
        return Err(ProtocolError::InvalidBidLength(ordered.len()));
    }
    let labels = ordered
        .chunks_exact(2)
        .map(|pair| store.bell_measure(pair[0], pair[1], rng))
        .collect::<Result<Vec<_>, _>>()?;
    epr_decode(&labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostConfirmation {
    pub verifier: PartyId,
    pub recovered: Bid,
    pub pass: bool,
}

/// Each verifier restores the winner's pair order, Bell-measures and
/// compares the result with the announced bid.
pub fn post_confirm<R: Rng + ?Sized>(
    store: &mut QubitStore,
    winner_permutation: &Permutation,
    held: &[(PartyId, Vec<QubitId>)],
    announced: &Bid,
    rng: &mut R,
) -> Result<Vec<PostConfirmation>, ProtocolError> {
    held.iter()
        .map(|(verifier, qubits)| {
            if qubits.len() != winner_permutation.len() {
                return Err(ProtocolError::LengthMismatch {
                    what: "winner permutation",
                    expected: qubits.len(),
                    found: winner_permutation.len(),
                });
            }
            let recovered = recover_bid(store, qubits, Some(winner_permutation), rng)?;
            let pass = &recovered == announced;
            Ok(PostConfirmation {
                verifier: *verifier,
                recovered,
                pass,
            })
        })
        .collect()
}
