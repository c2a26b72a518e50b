//! Dense pure-state vectors over a handful of qubits.
//!
//! Qubit 0 is the most significant bit of the amplitude index, so
//! `from_states(&[Zero, One])` has its single nonzero amplitude at index 1.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::QuantumError;

/// Tolerance used for normalization and orthogonality checks.
pub const NORM_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const H: Complex64 = Complex64::new(FRAC_1_SQRT_2, 0.0);
const IH: Complex64 = Complex64::new(0.0, FRAC_1_SQRT_2);

/// The six single-qubit states the auction ever prepares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CanonicalState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+y")]
    PlusY,
    #[serde(rename = "-y")]
    MinusY,
}

impl CanonicalState {
    pub const ALL: [CanonicalState; 6] = [
        CanonicalState::Zero,
        CanonicalState::One,
        CanonicalState::Plus,
        CanonicalState::Minus,
        CanonicalState::PlusY,
        CanonicalState::MinusY,
    ];

    /// States a bid carrier may be prepared in.
    pub const CARRIERS: [CanonicalState; 4] = [
        CanonicalState::Zero,
        CanonicalState::One,
        CanonicalState::Plus,
        CanonicalState::Minus,
    ];

    /// States a decoy photon may be prepared in.
    pub const DECOYS: [CanonicalState; 4] = [
        CanonicalState::Plus,
        CanonicalState::Minus,
        CanonicalState::PlusY,
        CanonicalState::MinusY,
    ];

    pub fn amplitudes(self) -> [Complex64; 2] {
        match self {
            CanonicalState::Zero => [ONE, ZERO],
            CanonicalState::One => [ZERO, ONE],
            CanonicalState::Plus => [H, H],
            CanonicalState::Minus => [H, -H],
            CanonicalState::PlusY => [H, IH],
            CanonicalState::MinusY => [H, -IH],
        }
    }

    pub fn vector(self) -> StateVector {
        StateVector {
            n_qubits: 1,
            amplitudes: self.amplitudes().to_vec(),
        }
    }

    /// The basis this state is an eigenstate of.
    pub fn basis(self) -> Basis {
        match self {
            CanonicalState::Zero | CanonicalState::One => Basis::Z,
            CanonicalState::Plus | CanonicalState::Minus => Basis::X,
            CanonicalState::PlusY | CanonicalState::MinusY => Basis::Y,
        }
    }

    /// Measurement outcome this state yields in its own basis.
    pub fn outcome(self) -> u8 {
        match self {
            CanonicalState::Zero | CanonicalState::Plus | CanonicalState::PlusY => 0,
            CanonicalState::One | CanonicalState::Minus | CanonicalState::MinusY => 1,
        }
    }

    /// The orthogonal partner within the same basis.
    pub fn flipped(self) -> CanonicalState {
        self.basis().eigenstate(1 - self.outcome())
    }

    pub fn label(self) -> &'static str {
        match self {
            CanonicalState::Zero => "0",
            CanonicalState::One => "1",
            CanonicalState::Plus => "+",
            CanonicalState::Minus => "-",
            CanonicalState::PlusY => "+y",
            CanonicalState::MinusY => "-y",
        }
    }

    pub fn is_carrier(self) -> bool {
        !matches!(self.basis(), Basis::Y)
    }

    pub fn is_decoy(self) -> bool {
        !matches!(self.basis(), Basis::Z)
    }
}

impl fmt::Display for CanonicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CanonicalState {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CanonicalState::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| QuantumError::UnknownLabel(s.to_string()))
    }
}

/// Measurement basis. Outcome 0 corresponds to the first eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    pub fn eigenstate(self, outcome: u8) -> CanonicalState {
        match (self, outcome) {
            (Basis::Z, 0) => CanonicalState::Zero,
            (Basis::Z, _) => CanonicalState::One,
            (Basis::X, 0) => CanonicalState::Plus,
            (Basis::X, _) => CanonicalState::Minus,
            (Basis::Y, 0) => CanonicalState::PlusY,
            (Basis::Y, _) => CanonicalState::MinusY,
        }
    }

    pub fn eigenstates(self) -> [CanonicalState; 2] {
        [self.eigenstate(0), self.eigenstate(1)]
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        };
        f.write_str(s)
    }
}

/// Gates the protocol and its adversaries use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    I,
    ISigmaY,
    Cnot,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::I | Gate::ISigmaY => 1,
            Gate::Cnot => 2,
        }
    }

    /// Row-major unitary: 2x2 for single-qubit gates, 4x4 for CNOT
    /// (control is the more significant qubit).
    pub fn matrix(self) -> Vec<Complex64> {
        match self {
            Gate::I => vec![ONE, ZERO, ZERO, ONE],
            // |0><1| - |1><0|
            Gate::ISigmaY => vec![ZERO, ONE, -ONE, ZERO],
            Gate::Cnot => {
                let mut m = vec![ZERO; 16];
                m[0] = ONE;
                m[5] = ONE;
                m[11] = ONE;
                m[14] = ONE;
                m
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Gate::I => "I",
            Gate::ISigmaY => "iσy",
            Gate::Cnot => "CNOT",
        };
        f.write_str(s)
    }
}

/// Normalized amplitude vector of length `2^n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Tensor product of canonical states, in sequence order.
    pub fn from_states(states: &[CanonicalState]) -> Result<Self, QuantumError> {
        let (first, rest) = states.split_first().ok_or(QuantumError::EmptySequence)?;
        Ok(rest
            .iter()
            .fold(first.vector(), |acc, s| acc.tensor(&s.vector())))
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self, QuantumError> {
        if n_qubits == 0 {
            return Err(QuantumError::EmptySequence);
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(QuantumError::InvalidAmplitudes(format!(
                "basis index {index} exceeds dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Accepts amplitudes whose squared norm is within 1e-9 of one and
    /// renormalizes them exactly.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QuantumError::InvalidAmplitudes(format!(
                "length {len} is not a power of two >= 2"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QuantumError::InvalidAmplitudes(format!(
                "squared norm {norm} is not 1"
            )));
        }
        let mut sv = StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        sv.normalize();
        Ok(sv)
    }

    /// Normalized superposition `sum c_k |v_k>`.
    pub fn linear_combination(terms: &[(Complex64, &StateVector)]) -> Result<Self, QuantumError> {
        let (_, first) = terms.first().ok_or(QuantumError::EmptySequence)?;
        let n = first.n_qubits;
        let mut amplitudes = vec![ZERO; 1 << n];
        for (c, v) in terms {
            if v.n_qubits != n {
                return Err(QuantumError::DimensionMismatch {
                    left: n,
                    right: v.n_qubits,
                });
            }
            for (acc, a) in amplitudes.iter_mut().zip(&v.amplitudes) {
                *acc += c * a;
            }
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm < NORM_TOLERANCE {
            return Err(QuantumError::InvalidAmplitudes(
                "superposition vanishes".to_string(),
            ));
        }
        let mut sv = StateVector {
            n_qubits: n,
            amplitudes,
        };
        sv.normalize();
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    /// Bit mask of qubit `index` inside an amplitude index.
    fn mask(&self, index: usize) -> usize {
        1 << (self.n_qubits - 1 - index)
    }

    fn check_index(&self, index: usize) -> Result<(), QuantumError> {
        if index >= self.n_qubits {
            Err(QuantumError::IndexOutOfRange {
                index,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amplitudes {
            *a /= norm;
        }
    }

    pub fn apply_single(&self, gate: Gate, index: usize) -> Result<StateVector, QuantumError> {
        let mut out = self.clone();
        out.apply_single_mut(gate, index)?;
        Ok(out)
    }

    pub(crate) fn apply_single_mut(
        &mut self,
        gate: Gate,
        index: usize,
    ) -> Result<(), QuantumError> {
        if gate.arity() != 1 {
            return Err(QuantumError::NotSingleQubit(gate));
        }
        self.check_index(index)?;
        let m = gate.matrix();
        let mask = self.mask(index);
        for i in 0..self.amplitudes.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | mask];
            self.amplitudes[i] = m[0] * a0 + m[1] * a1;
            self.amplitudes[i | mask] = m[2] * a0 + m[3] * a1;
        }
        Ok(())
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<StateVector, QuantumError> {
        let mut out = self.clone();
        out.apply_cnot_mut(control, target)?;
        Ok(out)
    }

    pub(crate) fn apply_cnot_mut(
        &mut self,
        control: usize,
        target: usize,
    ) -> Result<(), QuantumError> {
        self.check_index(control)?;
        self.check_index(target)?;
        if control == target {
            return Err(QuantumError::SameQubit(control));
        }
        let cm = self.mask(control);
        let tm = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amplitudes.swap(i, i | tm);
            }
        }
        Ok(())
    }

    /// `<e|_index psi` as an unnormalized state on the remaining qubits,
    /// laid out in the original order with `index` removed.
    fn project_onto(&self, index: usize, e: [Complex64; 2]) -> Vec<Complex64> {
        let mask = self.mask(index);
        let low = mask - 1;
        let mut rest = vec![ZERO; self.amplitudes.len() / 2];
        for (r, slot) in rest.iter_mut().enumerate() {
            // reinsert a zero bit at the position of `index`
            let i0 = ((r & !low) << 1) | (r & low);
            *slot = e[0].conj() * self.amplitudes[i0] + e[1].conj() * self.amplitudes[i0 | mask];
        }
        rest
    }

    /// Born probabilities of the two outcomes when qubit `index` is measured in `basis`.
    pub fn probabilities(&self, index: usize, basis: Basis) -> Result<[f64; 2], QuantumError> {
        self.check_index(index)?;
        let mut p = [0.0; 2];
        for (outcome, prob) in p.iter_mut().enumerate() {
            let e = basis.eigenstate(outcome as u8).amplitudes();
            *prob = self
                .project_onto(index, e)
                .iter()
                .map(|a| a.norm_sqr())
                .sum();
        }
        Ok(p)
    }

    /// Projective measurement of one qubit; returns the outcome and the
    /// normalized post-measurement state.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        index: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<(u8, StateVector), QuantumError> {
        let probs = self.probabilities(index, basis)?;
        let outcome = sample(&probs, rng) as u8;
        let e = basis.eigenstate(outcome).amplitudes();
        let rest = self.project_onto(index, e);
        let scale = probs[outcome as usize].sqrt();
        let mask = self.mask(index);
        let low = mask - 1;
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (r, c) in rest.iter().enumerate() {
            let i0 = ((r & !low) << 1) | (r & low);
            amplitudes[i0] = e[0] * c / scale;
            amplitudes[i0 | mask] = e[1] * c / scale;
        }
        let mut post = StateVector {
            n_qubits: self.n_qubits,
            amplitudes,
        };
        post.normalize();
        Ok((outcome, post))
    }

    /// Removes qubit `index`, which must be in the product state `e`
    /// with the rest of the register.
    pub fn contract_qubit(
        &self,
        index: usize,
        e: [Complex64; 2],
    ) -> Result<StateVector, QuantumError> {
        self.check_index(index)?;
        if self.n_qubits < 2 {
            return Err(QuantumError::EmptySequence);
        }
        let rest = self.project_onto(index, e);
        let norm: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QuantumError::NotSeparable(index));
        }
        let mut sv = StateVector {
            n_qubits: self.n_qubits - 1,
            amplitudes: rest,
        };
        sv.normalize();
        Ok(sv)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QuantumError> {
        if self.n_qubits != other.n_qubits {
            return Err(QuantumError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True iff `|<self|other>| >= 1 - tol`.
    pub fn equal_up_to_phase(&self, other: &StateVector, tol: f64) -> Result<bool, QuantumError> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }

    /// Reorders qubits: qubit `i` of the result is qubit `map[i]` of `self`.
    pub fn permute_qubits(&self, map: &[usize]) -> Result<StateVector, QuantumError> {
        let n = self.n_qubits;
        if map.len() != n {
            return Err(QuantumError::InvalidPermutation(format!(
                "length {} for {n} qubits",
                map.len()
            )));
        }
        let mut seen = vec![false; n];
        for &m in map {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(QuantumError::InvalidPermutation(format!("{map:?}")));
            }
        }
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (old, a) in self.amplitudes.iter().enumerate() {
            let mut new = 0usize;
            for (i, &src) in map.iter().enumerate() {
                if old & self.mask(src) != 0 {
                    new |= 1 << (n - 1 - i);
                }
            }
            amplitudes[new] = *a;
        }
        Ok(StateVector {
            n_qubits: n,
            amplitudes,
        })
    }

    /// Amplitudes rotated so the first nonzero one is real and positive.
    pub fn canonical_amplitudes(&self) -> Vec<(f64, f64)> {
        let phase = self
            .amplitudes
            .iter()
            .find(|a| a.norm() > NORM_TOLERANCE)
            .map(|a| a.conj() / a.norm())
            .unwrap_or(ONE);
        self.amplitudes
            .iter()
            .map(|a| {
                let c = a * phase;
                (clean(c.re), clean(c.im))
            })
            .collect()
    }
}

/// Drops rounding residue and negative zero so serialized forms are stable.
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// Samples an index from a probability vector summing to one.
pub(crate) fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= NORM_TOLERANCE {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.canonical_amplitudes().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(deserializer)?;
        let amps = pairs
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        StateVector::from_amplitudes(amps).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_amps(sv: &StateVector, expected: &[Complex64]) {
        assert_eq!(sv.amplitudes().len(), expected.len());
        for (a, e) in sv.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < NORM_TOLERANCE, "{a} != {e}");
        }
    }

    #[test]
    fn from_states_examples() {
        assert_amps(
            &StateVector::from_states(&[CanonicalState::Zero]).unwrap(),
            &[c(1.0, 0.0), c(0.0, 0.0)],
        );
        let r = FRAC_1_SQRT_2;
        assert_amps(
            &StateVector::from_states(&[CanonicalState::Plus]).unwrap(),
            &[c(r, 0.0), c(r, 0.0)],
        );
        assert_amps(
            &StateVector::from_states(&[CanonicalState::Zero, CanonicalState::One]).unwrap(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        assert_eq!(
            StateVector::from_states(&[]),
            Err(QuantumError::EmptySequence)
        );
    }

    #[test]
    fn canonical_states_are_distinct_and_normalized() {
        for a in CanonicalState::ALL {
            assert!((a.vector().norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
            for b in CanonicalState::ALL {
                if a != b {
                    assert!(!a.vector().equal_up_to_phase(&b.vector(), 1e-9).unwrap());
                }
            }
        }
    }

    #[test]
    fn basis_eigenstates_are_orthonormal() {
        for basis in Basis::ALL {
            let [e0, e1] = basis.eigenstates();
            assert!(e0.vector().inner(&e1.vector()).unwrap().norm() < NORM_TOLERANCE);
            assert_eq!(e0.basis(), basis);
            assert_eq!(e1.outcome(), 1);
        }
    }

    #[test]
    fn gates_are_unitary() {
        for gate in [Gate::I, Gate::ISigmaY, Gate::Cnot] {
            let m = gate.matrix();
            let d = if gate.arity() == 1 { 2 } else { 4 };
            for i in 0..d {
                for j in 0..d {
                    // (U^dagger U)_{ij} = sum_k conj(U_ki) U_kj
                    let v: Complex64 = (0..d).map(|k| m[k * d + i].conj() * m[k * d + j]).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - c(expected, 0.0)).norm() < NORM_TOLERANCE);
                }
            }
        }
        // |0><1| - |1><0|
        assert_eq!(
            Gate::ISigmaY.matrix(),
            vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn isigmay_action() {
        let zero = CanonicalState::Zero.vector();
        let out = zero.apply_single(Gate::ISigmaY, 0).unwrap();
        assert_amps(&out, &[c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(out
            .equal_up_to_phase(&CanonicalState::One.vector(), 1e-12)
            .unwrap());

        let plus = CanonicalState::Plus.vector();
        let out = plus.apply_single(Gate::ISigmaY, 0).unwrap();
        assert_amps(&out, CanonicalState::Minus.amplitudes().as_slice());

        for s in CanonicalState::ALL {
            assert_eq!(s.vector().apply_single(Gate::I, 0).unwrap(), s.vector());
        }
    }

    #[test]
    fn apply_single_errors() {
        let sv = CanonicalState::Zero.vector();
        assert_eq!(
            sv.apply_single(Gate::I, 1),
            Err(QuantumError::IndexOutOfRange {
                index: 1,
                n_qubits: 1
            })
        );
        assert_eq!(
            sv.apply_single(Gate::Cnot, 0),
            Err(QuantumError::NotSingleQubit(Gate::Cnot))
        );
    }

    #[test]
    fn cnot_examples() {
        let r = FRAC_1_SQRT_2;
        let sv = StateVector::from_states(&[CanonicalState::Plus, CanonicalState::Zero]).unwrap();
        assert_amps(
            &sv.apply_cnot(0, 1).unwrap(),
            &[c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)],
        );
        let sv = StateVector::from_states(&[CanonicalState::MinusY, CanonicalState::Zero]).unwrap();
        assert_amps(
            &sv.apply_cnot(0, 1).unwrap(),
            &[c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -r)],
        );
        let sv = StateVector::from_states(&[CanonicalState::Zero, CanonicalState::Zero]).unwrap();
        assert_eq!(sv.apply_cnot(0, 1).unwrap(), sv);
        assert_eq!(sv.apply_cnot(1, 1), Err(QuantumError::SameQubit(1)));
        assert!(sv.apply_cnot(0, 2).is_err());
    }

    #[test]
    fn cnot_respects_qubit_order() {
        // control on the second qubit
        let sv = StateVector::from_states(&[CanonicalState::Zero, CanonicalState::One]).unwrap();
        let out = sv.apply_cnot(1, 0).unwrap();
        let expected =
            StateVector::from_states(&[CanonicalState::One, CanonicalState::One]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn measurement_of_eigenstate_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plus = CanonicalState::Plus.vector();
        for _ in 0..100 {
            let (o, post) = plus.measure(0, Basis::X, &mut rng).unwrap();
            assert_eq!(o, 0);
            assert!(post.equal_up_to_phase(&plus, 1e-12).unwrap());
        }
    }

    #[test]
    fn measurement_collapses_correlated_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = StateVector::from_states(&[CanonicalState::Plus, CanonicalState::Zero])
            .unwrap()
            .apply_cnot(0, 1)
            .unwrap();
        for _ in 0..50 {
            let (b, post) = phi.measure(0, Basis::Z, &mut rng).unwrap();
            let idx = if b == 0 { 0 } else { 3 };
            assert_eq!(post, StateVector::basis_state(2, idx).unwrap());
        }
        assert!(phi.measure(2, Basis::Z, &mut rng).is_err());
    }

    #[test]
    fn measurement_frequencies_match_born_rule() {
        // |<+|0>|^2 = 1/2
        let zero = CanonicalState::Zero.vector();
        assert_eq!(
            zero.probabilities(0, Basis::X)
                .unwrap()
                .map(|p| (p * 1e12).round()),
            [5e11, 5e11]
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000;
        let ones = (0..trials)
            .filter(|_| zero.measure(0, Basis::X, &mut rng).unwrap().0 == 1)
            .count();
        let p = ones as f64 / trials as f64;
        let se = (0.25f64 / trials as f64).sqrt();
        assert!((p - 0.5).abs() < 3.0 * se, "p = {p}");
    }

    #[test]
    fn equal_up_to_phase_examples() {
        let one = CanonicalState::One.vector();
        let neg_one = StateVector::linear_combination(&[(c(-1.0, 0.0), &one)]).unwrap();
        assert!(one.equal_up_to_phase(&neg_one, 1e-12).unwrap());
        assert!(!CanonicalState::Zero
            .vector()
            .equal_up_to_phase(&one, 1e-12)
            .unwrap());
        let flipped_minus = CanonicalState::Minus
            .vector()
            .apply_single(Gate::ISigmaY, 0)
            .unwrap();
        assert_amps(
            &flipped_minus,
            &[c(-FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        );
        assert!(flipped_minus
            .equal_up_to_phase(&CanonicalState::Plus.vector(), 1e-12)
            .unwrap());
        assert!(one
            .equal_up_to_phase(&StateVector::basis_state(2, 0).unwrap(), 1e-12)
            .is_err());
    }

    #[test]
    fn contract_requires_product_state() {
        let pair = StateVector::from_states(&[CanonicalState::Plus, CanonicalState::Zero])
            .unwrap()
            .apply_cnot(0, 1)
            .unwrap();
        assert_eq!(
            pair.contract_qubit(0, CanonicalState::Zero.amplitudes()),
            Err(QuantumError::NotSeparable(0))
        );
        let prod =
            StateVector::from_states(&[CanonicalState::MinusY, CanonicalState::One]).unwrap();
        let rest = prod
            .contract_qubit(0, CanonicalState::MinusY.amplitudes())
            .unwrap();
        assert_eq!(rest, CanonicalState::One.vector());
    }

    #[test]
    fn canonical_serialization_fixes_phase() {
        let one = CanonicalState::One.vector();
        let neg = StateVector::linear_combination(&[(c(0.0, -1.0), &one)]).unwrap();
        assert_eq!(neg.canonical_amplitudes(), vec![(0.0, 0.0), (1.0, 0.0)]);
        let json = serde_json::to_string(&CanonicalState::MinusY.vector()).unwrap();
        let back: StateVector = serde_json::from_str(&json).unwrap();
        assert!(back
            .equal_up_to_phase(&CanonicalState::MinusY.vector(), 1e-12)
            .unwrap());
        assert_eq!(
            serde_json::to_string(&CanonicalState::ALL).unwrap(),
            r#"["0","1","+","-","+y","-y"]"#
        );
        for s in CanonicalState::ALL {
            assert_eq!(s.label().parse::<CanonicalState>().unwrap(), s);
        }
    }

    #[test]
    fn permute_qubits_moves_sources() {
        let sv = StateVector::from_states(&[
            CanonicalState::Zero,
            CanonicalState::One,
            CanonicalState::Plus,
        ])
        .unwrap();
        let out = sv.permute_qubits(&[2, 0, 1]).unwrap();
        let expected = StateVector::from_states(&[
            CanonicalState::Plus,
            CanonicalState::Zero,
            CanonicalState::One,
        ])
        .unwrap();
        assert_eq!(out, expected);
        assert!(sv.permute_qubits(&[0, 0, 1]).is_err());
    }
}
