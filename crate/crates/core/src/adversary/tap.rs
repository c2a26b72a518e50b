use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BasisPolicy;
use crate::quantum::{Basis, CanonicalState, QuantumError, QubitId, QubitStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TapBehavior {
    PassThrough,
    InterceptResend(BasisPolicy),
    CnotAncilla,
}

impl TapBehavior {
    pub fn name(self) -> &'static str {
        match self {
            TapBehavior::PassThrough => "pass_through",
            TapBehavior::InterceptResend(_) => "intercept_resend",
            TapBehavior::CnotAncilla => "cnot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterceptNote {
    pub qubit: QubitId,
    pub basis: Basis,
    pub outcome: u8,
}

/// An adversary on a quantum channel. It only ever sees the qubits in
/// transit, never the sender's decoy positions or bases.
#[derive(Debug, Clone)]
pub struct ChannelTap {
    pub behavior: TapBehavior,
    /// Ancillas entangled with transiting qubits and kept by the adversary.
    pub ancillas: Vec<QubitId>,
    pub notes: Vec<InterceptNote>,
    /// Number of qubits that passed through the tap.
    pub seen: usize,
}

impl ChannelTap {
    pub fn new(behavior: TapBehavior) -> Self {
        ChannelTap {
            behavior,
            ancillas: Vec::new(),
            notes: Vec::new(),
            seen: 0,
        }
    }

    /// Acts on a sequence in transit; the same qubits are forwarded.
    pub fn act<R: Rng + ?Sized>(
        &mut self,
        store: &mut QubitStore,
        in_transit: &[QubitId],
        rng: &mut R,
    ) -> Result<(), QuantumError> {
        self.seen += in_transit.len();
        match self.behavior {
            TapBehavior::PassThrough => Ok(()),
            TapBehavior::InterceptResend(policy) => {
                intercept_resend(self, store, in_transit, policy, rng)
            }
            TapBehavior::CnotAncilla => cnot_ancilla(self, store, in_transit),
        }
    }
}

/// Measures every transiting qubit in a policy-drawn basis and forwards the
/// collapsed state.
pub fn intercept_resend<R: Rng + ?Sized>(
    tap: &mut ChannelTap,
    store: &mut QubitStore,
    in_transit: &[QubitId],
    policy: BasisPolicy,
    rng: &mut R,
) -> Result<(), QuantumError> {
    for &qubit in in_transit {
        let basis = policy.draw(rng);
        let outcome = store.measure(qubit, basis, rng)?;
        tap.notes.push(InterceptNote {
            qubit,
            basis,
            outcome,
        });
    }
    Ok(())
}

/// CNOT from each transiting qubit onto a fresh |0> ancilla the adversary
/// keeps.
pub fn cnot_ancilla(
    tap: &mut ChannelTap,
    store: &mut QubitStore,
    in_transit: &[QubitId],
) -> Result<(), QuantumError> {
    for &qubit in in_transit {
        let ancilla = store.prepare(CanonicalState::Zero);
        store.apply_cnot(qubit, ancilla)?;
        tap.ancillas.push(ancilla);
    }
    Ok(())
}
