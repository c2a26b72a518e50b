use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::{recover_bid, Bid, PartyId, ProtocolError, WinnerDecision};
use crate::quantum::{QubitId, QubitStore};

/// Protocol deviations by legitimate parties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DishonestBehavior {
    /// The auctioneer names `winner` with bid `fabricated` regardless of
    /// what it decoded.
    FalseAnnouncement { winner: PartyId, fabricated: Bid },
    /// Colluding bidders Bell-measure the EPR sequences they hold from
    /// honest bidders before any permutation is revealed.
    CollusionMeasureDisordered { colluders: Vec<PartyId> },
}

/// Replaces the auctioneer's honest decision with the fabricated one.
pub fn false_announcement(
    _honest: &WinnerDecision,
    winner: PartyId,
    fabricated: &Bid,
) -> WinnerDecision {
    WinnerDecision::Winner(winner, fabricated.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollusionGuess {
    pub colluder: PartyId,
    pub target: PartyId,
    pub guess: Bid,
    pub truth: Bid,
}

impl CollusionGuess {
    pub fn correct(&self) -> bool {
        self.guess == self.truth
    }
}

/// Each colluder measures aligned pairs of every sequence it holds from a
/// non-colluding bidder and decodes the labels as its guess. `held` maps
/// (holder, owner) to the holder's copy; measured copies are removed.
pub fn collusion_measure_disordered<R: Rng + ?Sized>(
    store: &mut QubitStore,
    colluders: &[PartyId],
    held: &mut BTreeMap<(PartyId, PartyId), Vec<QubitId>>,
    true_bids: &BTreeMap<PartyId, Bid>,
    rng: &mut R,
) -> Result<Vec<CollusionGuess>, ProtocolError> {
    let mut guesses = Vec::new();
    for colluder in colluders {
        let targets: Vec<PartyId> = held
            .keys()
            .filter(|(holder, owner)| holder == colluder && !colluders.contains(owner))
            .map(|(_, owner)| *owner)
            .collect();
        for target in targets {
            let qubits = held
                .remove(&(*colluder, target))
                .expect("key collected above");
            let guess = recover_bid(store, &qubits, None, rng)?;
            guesses.push(CollusionGuess {
                colluder: *colluder,
                target,
                guess,
                truth: true_bids[&target].clone(),
            });
        }
    }
    Ok(guesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{epr_encode_bid, EprSequence, Permutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_permutation_leaks_bid() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let mut store = QubitStore::new();
        let bid: Bid = "1011".parse().unwrap();
        let seq = EprSequence::prepare(
            &mut store,
            PartyId::Bidder(1),
            PartyId::Bidder(2),
            epr_encode_bid(&bid).unwrap(),
            Permutation::identity(4),
        )
        .unwrap();
        let mut held = BTreeMap::new();
        held.insert((PartyId::Bidder(2), PartyId::Bidder(1)), seq.qubits);
        let truth = BTreeMap::from([(PartyId::Bidder(1), bid.clone())]);
        let guesses = collusion_measure_disordered(
            &mut store,
            &[PartyId::Bidder(2)],
            &mut held,
            &truth,
            &mut rng,
        )
        .unwrap();
        assert_eq!(guesses.len(), 1);
        assert!(guesses[0].correct());
        assert!(held.is_empty());
    }

    #[test]
    fn colluders_skip_each_other() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let mut store = QubitStore::new();
        let mut held = BTreeMap::new();
        let a = store.prepare_all(&[crate::quantum::CanonicalState::Zero; 2]);
        held.insert((PartyId::Bidder(2), PartyId::Bidder(3)), a);
        let truth = BTreeMap::new();
        let guesses = collusion_measure_disordered(
            &mut store,
            &[PartyId::Bidder(2), PartyId::Bidder(3)],
            &mut held,
            &truth,
            &mut rng,
        )
        .unwrap();
        assert!(guesses.is_empty());
        assert_eq!(held.len(), 1);
    }

    #[test]
    fn false_announcement_overrides() {
        let honest = WinnerDecision::Winner(PartyId::Bidder(1), "1011".parse().unwrap());
        let fake: Bid = "1111".parse().unwrap();
        assert_eq!(
            false_announcement(&honest, PartyId::Bidder(2), &fake),
            WinnerDecision::Winner(PartyId::Bidder(2), fake)
        );
    }
}
