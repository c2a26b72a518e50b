//! Single-photon bid carriers: preparation, encoding, and the auctioneer's
//! decoding.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Bid, PartyId, ProtocolError};
use crate::quantum::{CanonicalState, Gate, QubitId, QubitStore, StateVector};

/// Validates a bid length: positive and even, since the EPR stage packs
/// two bits per pair.
pub fn check_bid_length(m: usize) -> Result<(), ProtocolError> {
    if m < 2 || !m.is_multiple_of(2) {
        Err(ProtocolError::InvalidBidLength(m))
    } else {
        Ok(())
    }
}

/// A list of carrier states, written as space-separated labels ("0 1 + -").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrierStates(pub Vec<CanonicalState>);

impl CarrierStates {
    pub fn new(states: Vec<CanonicalState>) -> Result<Self, ProtocolError> {
        if let Some(bad) = states.iter().find(|s| !s.is_carrier()) {
            return Err(ProtocolError::InvalidCarrierState(*bad));
        }
        Ok(CarrierStates(states))
    }

    /// Independent uniform draws from the four carrier states.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self, ProtocolError> {
        check_bid_length(m)?;
        Ok(CarrierStates(
            (0..m)
                .map(|_| CanonicalState::CARRIERS[rng.gen_range(0..4)])
                .collect(),
        ))
    }

    pub fn labels(&self) -> String {
        self.0
            .iter()
            .map(|s| s.label())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl std::str::FromStr for CarrierStates {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let states = s
            .split_whitespace()
            .map(|t| t.parse::<CanonicalState>())
            .collect::<Result<Vec<_>, _>>()?;
        CarrierStates::new(states)
    }
}

impl Serialize for CarrierStates {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.labels())
    }
}

impl<'de> Deserialize<'de> for CarrierStates {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One bidder's carrier sequence. The same value lives through preparation,
/// transit and encoding; `qubits` always lists the data qubits only.
#[derive(Debug, Clone)]
pub struct CarrierSequence {
    pub owner: PartyId,
    pub initial_states: Vec<CanonicalState>,
    pub qubits: Vec<QubitId>,
}

impl CarrierSequence {
    pub fn from_states(
        store: &mut QubitStore,
        owner: PartyId,
        states: &CarrierStates,
    ) -> Result<Self, ProtocolError> {
        check_bid_length(states.0.len())?;
        Ok(CarrierSequence {
            owner,
            initial_states: states.0.clone(),
            qubits: store.prepare_all(&states.0),
        })
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }
}

/// Draws `m` carriers uniformly from {|0>, |1>, |+>, |->}.
pub fn prepare_carriers<R: Rng + ?Sized>(
    store: &mut QubitStore,
    owner: PartyId,
    m: usize,
    rng: &mut R,
) -> Result<CarrierSequence, ProtocolError> {
    let states = CarrierStates::random(m, rng)?;
    CarrierSequence::from_states(store, owner, &states)
}

fn gate_for(bit: bool) -> Gate {
    if bit {
        Gate::ISigmaY
    } else {
        Gate::I
    }
}

/// Applies I for a 0 bit and iσy for a 1 bit, qubit by qubit.
pub fn encode_bid(
    store: &mut QubitStore,
    qubits: &[QubitId],
    bid: &Bid,
) -> Result<(), ProtocolError> {
    if qubits.len() != bid.len() {
        return Err(ProtocolError::LengthMismatch {
            what: "bid",
            expected: qubits.len(),
            found: bid.len(),
        });
    }
    for (q, bit) in qubits.iter().zip(bid.bits()) {
        store.apply_single(*q, gate_for(*bit))?;
    }
    Ok(())
}

/// Measures each returned qubit in the basis it was prepared in; a bit is 1
/// iff the outcome differs from the prepared eigenstate.
pub fn decode_bid<R: Rng + ?Sized>(
    store: &mut QubitStore,
    initial_states: &[CanonicalState],
    qubits: &[QubitId],
    rng: &mut R,
) -> Result<Bid, ProtocolError> {
    if qubits.len() != initial_states.len() {
        return Err(ProtocolError::LengthMismatch {
            what: "returned sequence",
            expected: initial_states.len(),
            found: qubits.len(),
        });
    }
    let bits = initial_states
        .iter()
        .zip(qubits)
        .map(|(s, q)| {
            if !s.is_carrier() {
                return Err(ProtocolError::InvalidCarrierState(*s));
            }
            Ok(store.measure(*q, s.basis(), rng)? != s.outcome())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Bid::new(bits)
}

/// [`encode_bid`] on a standalone register.
pub fn encode_bid_state(sv: &StateVector, bid: &Bid) -> Result<StateVector, ProtocolError> {
    if sv.n_qubits() != bid.len() {
        return Err(ProtocolError::LengthMismatch {
            what: "bid",
            expected: sv.n_qubits(),
            found: bid.len(),
        });
    }
    let mut out = sv.clone();
    for (i, bit) in bid.bits().iter().enumerate() {
        out = out.apply_single(gate_for(*bit), i)?;
    }
    Ok(out)
}

/// [`decode_bid`] on a standalone register.
pub fn decode_bid_state<R: Rng + ?Sized>(
    initial_states: &[CanonicalState],
    sv: &StateVector,
    rng: &mut R,
) -> Result<Bid, ProtocolError> {
    if sv.n_qubits() != initial_states.len() {
        return Err(ProtocolError::LengthMismatch {
            what: "returned register",
            expected: initial_states.len(),
            found: sv.n_qubits(),
        });
    }
    let mut store = QubitStore::new();
    let qubits = store.alloc(sv.clone());
    decode_bid(&mut store, initial_states, &qubits, rng)
}
