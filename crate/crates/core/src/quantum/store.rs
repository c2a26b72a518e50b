//! A run-wide register kept as a tensor product of small factors.
//!
//! Every protocol state is a product of single qubits and Bell pairs, and
//! every attack touches one transiting qubit plus one ancilla at a time, so
//! factors never grow past a few qubits even when hundreds are in flight.
//! Two factors merge only when a gate or joint measurement spans them, and
//! measured qubits are split back out.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bell::{prepare_bell, BellLabel};
use super::state::{Basis, CanonicalState, Gate, StateVector};
use super::QuantumError;

/// Handle to one physical qubit in a [`QubitStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitId(usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
struct Factor {
    state: StateVector,
    members: Vec<QubitId>,
}

#[derive(Debug, Clone, Default)]
pub struct QubitStore {
    factors: Vec<Option<Factor>>,
    // qubit id -> (factor, position within factor)
    location: Vec<(usize, usize)>,
}

impl QubitStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of qubits ever allocated.
    pub fn len(&self) -> usize {
        self.location.len()
    }

    pub fn is_empty(&self) -> bool {
        self.location.is_empty()
    }

    /// Largest live factor, in qubits.
    pub fn max_factor_size(&self) -> usize {
        self.factors
            .iter()
            .flatten()
            .map(|f| f.members.len())
            .max()
            .unwrap_or(0)
    }

    pub fn alloc(&mut self, state: StateVector) -> Vec<QubitId> {
        let fidx = self.factors.len();
        let members: Vec<QubitId> = (0..state.n_qubits())
            .map(|pos| {
                let id = QubitId(self.location.len());
                self.location.push((fidx, pos));
                id
            })
            .collect();
        self.factors.push(Some(Factor {
            state,
            members: members.clone(),
        }));
        members
    }

    pub fn prepare(&mut self, state: CanonicalState) -> QubitId {
        self.alloc(state.vector())[0]
    }

    pub fn prepare_all(&mut self, states: &[CanonicalState]) -> Vec<QubitId> {
        states.iter().map(|s| self.prepare(*s)).collect()
    }

    pub fn prepare_bell(&mut self, label: BellLabel) -> [QubitId; 2] {
        let ids = self.alloc(prepare_bell(label));
        [ids[0], ids[1]]
    }

    fn locate(&self, id: QubitId) -> Result<(usize, usize), QuantumError> {
        self.location
            .get(id.0)
            .copied()
            .ok_or(QuantumError::UnknownQubit(id.0))
    }

    fn factor(&self, fidx: usize) -> &Factor {
        self.factors[fidx].as_ref().expect("located factor is live")
    }

    fn factor_mut(&mut self, fidx: usize) -> &mut Factor {
        self.factors[fidx].as_mut().expect("located factor is live")
    }

    /// Merges factor `b` into factor `a`; returns `a`.
    fn merge(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            return a;
        }
        let fb = self.factors[b].take().expect("merged factor is live");
        let fa = self.factor_mut(a);
        let offset = fa.members.len();
        fa.state = fa.state.tensor(&fb.state);
        fa.members.extend(&fb.members);
        for (k, id) in fb.members.iter().enumerate() {
            self.location[id.0] = (a, offset + k);
        }
        a
    }

    fn reindex(&mut self, fidx: usize) {
        let members = self.factor(fidx).members.clone();
        for (pos, id) in members.into_iter().enumerate() {
            self.location[id.0] = (fidx, pos);
        }
    }

    pub fn apply_single(&mut self, id: QubitId, gate: Gate) -> Result<(), QuantumError> {
        let (f, pos) = self.locate(id)?;
        self.factor_mut(f).state.apply_single_mut(gate, pos)
    }

    pub fn apply_cnot(&mut self, control: QubitId, target: QubitId) -> Result<(), QuantumError> {
        if control == target {
            return Err(QuantumError::SameQubit(control.0));
        }
        let (fc, _) = self.locate(control)?;
        let (ft, _) = self.locate(target)?;
        let f = self.merge(fc, ft);
        let (_, pc) = self.location[control.0];
        let (_, pt) = self.location[target.0];
        self.factor_mut(f).state.apply_cnot_mut(pc, pt)
    }

    pub fn probabilities(&self, id: QubitId, basis: Basis) -> Result<[f64; 2], QuantumError> {
        let (f, pos) = self.locate(id)?;
        self.factor(f).state.probabilities(pos, basis)
    }

    /// Measures one qubit; afterwards it sits alone in its own factor.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        id: QubitId,
        basis: Basis,
        rng: &mut R,
    ) -> Result<u8, QuantumError> {
        let (f, pos) = self.locate(id)?;
        let (outcome, post) = self.factor(f).state.measure(pos, basis, rng)?;
        let collapsed = basis.eigenstate(outcome);
        if post.n_qubits() == 1 {
            self.factor_mut(f).state = post;
            return Ok(outcome);
        }
        let rest = post.contract_qubit(pos, collapsed.amplitudes())?;
        let factor = self.factor_mut(f);
        factor.state = rest;
        factor.members.remove(pos);
        self.reindex(f);
        let nf = self.factors.len();
        self.factors.push(Some(Factor {
            state: collapsed.vector(),
            members: vec![id],
        }));
        self.location[id.0] = (nf, 0);
        Ok(outcome)
    }

    /// Bell measurement of `(a, b)`; afterwards the pair forms its own factor.
    pub fn bell_measure<R: Rng + ?Sized>(
        &mut self,
        a: QubitId,
        b: QubitId,
        rng: &mut R,
    ) -> Result<BellLabel, QuantumError> {
        if a == b {
            return Err(QuantumError::SameQubit(a.0));
        }
        let (fa, _) = self.locate(a)?;
        let (fb, _) = self.locate(b)?;
        let f = self.merge(fa, fb);
        let (_, pa) = self.location[a.0];
        let (_, pb) = self.location[b.0];
        let (label, post) = self.factor(f).state.bell_measure(pa, pb, rng)?;
        if post.n_qubits() == 2 {
            let factor = self.factor_mut(f);
            factor.state = prepare_bell(label);
            factor.members = vec![a, b];
            self.reindex(f);
            return Ok(label);
        }
        let rest = post.contract_pair(pa, pb, label.amplitudes())?;
        let factor = self.factor_mut(f);
        factor.state = rest;
        factor.members.retain(|m| *m != a && *m != b);
        self.reindex(f);
        let nf = self.factors.len();
        self.factors.push(Some(Factor {
            state: prepare_bell(label),
            members: vec![a, b],
        }));
        self.location[a.0] = (nf, 0);
        self.location[b.0] = (nf, 1);
        Ok(label)
    }

    /// Number of qubits sharing a factor with `id` (including itself).
    pub fn factor_size(&self, id: QubitId) -> Result<usize, QuantumError> {
        let (f, _) = self.locate(id)?;
        Ok(self.factor(f).members.len())
    }

    /// Pure joint state of `ids`, in the given order. Fails with
    /// `NotIsolated` if any of them is entangled with a qubit outside `ids`.
    pub fn joint_state(&self, ids: &[QubitId]) -> Result<StateVector, QuantumError> {
        if ids.is_empty() {
            return Err(QuantumError::EmptySequence);
        }
        let mut factors: Vec<usize> = Vec::new();
        for (k, id) in ids.iter().enumerate() {
            if ids[..k].contains(id) {
                return Err(QuantumError::SameQubit(id.0));
            }
            let (f, _) = self.locate(*id)?;
            if !factors.contains(&f) {
                factors.push(f);
            }
        }
        let mut order: Vec<QubitId> = Vec::new();
        let mut state: Option<StateVector> = None;
        for f in factors {
            let factor = self.factor(f);
            if let Some(outside) = factor.members.iter().find(|m| !ids.contains(m)) {
                return Err(QuantumError::NotIsolated(outside.0));
            }
            order.extend(&factor.members);
            state = Some(match state {
                None => factor.state.clone(),
                Some(s) => s.tensor(&factor.state),
            });
        }
        let state = state.expect("at least one factor");
        let map: Vec<usize> = ids
            .iter()
            .map(|id| order.iter().position(|o| o == id).expect("collected above"))
            .collect();
        state.permute_qubits(&map)
    }
}
