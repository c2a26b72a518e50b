//! Bell-pair preparation and Bell-basis measurement.
//!
//! Amplitude convention: psi± = (|00> ± |11>)/√2 and phi± = (|01> ± |10>)/√2.
//! Only the label/code table is fixed by the auction; the convention just
//! has to be consistent.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::{sample, StateVector};
use super::QuantumError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const H: Complex64 = Complex64::new(FRAC_1_SQRT_2, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

impl BellLabel {
    /// Ordered by code: 00, 01, 10, 11.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// The two classical bits this label carries.
    pub fn code(self) -> [bool; 2] {
        match self {
            BellLabel::PsiPlus => [false, false],
            BellLabel::PsiMinus => [false, true],
            BellLabel::PhiPlus => [true, false],
            BellLabel::PhiMinus => [true, true],
        }
    }

    pub fn from_code(hi: bool, lo: bool) -> BellLabel {
        BellLabel::ALL[(hi as usize) << 1 | lo as usize]
    }

    pub fn index(self) -> usize {
        let [hi, lo] = self.code();
        (hi as usize) << 1 | lo as usize
    }

    pub fn amplitudes(self) -> [Complex64; 4] {
        match self {
            BellLabel::PsiPlus => [H, ZERO, ZERO, H],
            BellLabel::PsiMinus => [H, ZERO, ZERO, -H],
            BellLabel::PhiPlus => [ZERO, H, H, ZERO],
            BellLabel::PhiMinus => [ZERO, H, -H, ZERO],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BellLabel {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BellLabel::ALL
            .into_iter()
            .find(|l| l.label() == s)
            .ok_or_else(|| QuantumError::UnknownLabel(s.to_string()))
    }
}

pub fn prepare_bell(label: BellLabel) -> StateVector {
    StateVector::from_amplitudes(label.amplitudes().to_vec()).expect("Bell states are normalized")
}

impl StateVector {
    fn check_pair(&self, i: usize, j: usize) -> Result<(), QuantumError> {
        for idx in [i, j] {
            if idx >= self.n_qubits() {
                return Err(QuantumError::IndexOutOfRange {
                    index: idx,
                    n_qubits: self.n_qubits(),
                });
            }
        }
        if i == j {
            return Err(QuantumError::SameQubit(i));
        }
        Ok(())
    }

    /// `<B|_(i,j) psi` for each remaining-qubit configuration, indexed by
    /// the amplitude index with bits `i` and `j` cleared.
    fn pair_components(&self, i: usize, j: usize, bell: [Complex64; 4]) -> Vec<(usize, Complex64)> {
        let n = self.n_qubits();
        let mi = 1usize << (n - 1 - i);
        let mj = 1usize << (n - 1 - j);
        let amps = self.amplitudes();
        (0..amps.len())
            .filter(|k| k & (mi | mj) == 0)
            .map(|base| {
                let mut c = ZERO;
                for (ab, b) in bell.iter().enumerate() {
                    let mut idx = base;
                    if ab & 2 != 0 {
                        idx |= mi;
                    }
                    if ab & 1 != 0 {
                        idx |= mj;
                    }
                    c += b.conj() * amps[idx];
                }
                (base, c)
            })
            .collect()
    }

    /// Born probabilities of the four Bell outcomes on qubits `(i, j)`,
    /// indexed by label code.
    pub fn bell_probabilities(&self, i: usize, j: usize) -> Result<[f64; 4], QuantumError> {
        self.check_pair(i, j)?;
        let mut p = [0.0; 4];
        for label in BellLabel::ALL {
            p[label.index()] = self
                .pair_components(i, j, label.amplitudes())
                .iter()
                .map(|(_, c)| c.norm_sqr())
                .sum();
        }
        Ok(p)
    }

    /// Projective Bell measurement of qubits `(i, j)`.
    pub fn bell_measure<R: Rng + ?Sized>(
        &self,
        i: usize,
        j: usize,
        rng: &mut R,
    ) -> Result<(BellLabel, StateVector), QuantumError> {
        let probs = self.bell_probabilities(i, j)?;
        let label = BellLabel::ALL[sample(&probs, rng)];
        let n = self.n_qubits();
        let mi = 1usize << (n - 1 - i);
        let mj = 1usize << (n - 1 - j);
        let bell = label.amplitudes();
        let scale = probs[label.index()].sqrt();
        let mut amps = vec![ZERO; self.amplitudes().len()];
        for (base, c) in self.pair_components(i, j, bell) {
            for (ab, b) in bell.iter().enumerate() {
                let mut idx = base;
                if ab & 2 != 0 {
                    idx |= mi;
                }
                if ab & 1 != 0 {
                    idx |= mj;
                }
                amps[idx] = b * c / scale;
            }
        }
        Ok((label, StateVector::from_amplitudes(amps)?))
    }

    /// Removes qubits `i` and `j`, which must jointly be in the two-qubit
    /// state `pair` (ordered `(i, j)`) in product with the rest.
    pub fn contract_pair(
        &self,
        i: usize,
        j: usize,
        pair: [Complex64; 4],
    ) -> Result<StateVector, QuantumError> {
        self.check_pair(i, j)?;
        if self.n_qubits() < 3 {
            return Err(QuantumError::EmptySequence);
        }
        let comps = self.pair_components(i, j, pair);
        let norm: f64 = comps.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QuantumError::NotSeparable(i));
        }
        // `comps` is ordered by increasing base index, which is the order of
        // the remaining qubits once bits i and j are squeezed out.
        let amps = comps.into_iter().map(|(_, c)| c).collect();
        StateVector::from_amplitudes(amps)
    }
}

/// Free-function form of [`StateVector::bell_measure`].
pub fn bell_measure<R: Rng + ?Sized>(
    sv: &StateVector,
    i: usize,
    j: usize,
    rng: &mut R,
) -> Result<(BellLabel, StateVector), QuantumError> {
    sv.bell_measure(i, j, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::CanonicalState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn code_table_is_bijective() {
        let codes: Vec<_> = BellLabel::ALL.iter().map(|l| l.code()).collect();
        assert_eq!(
            codes,
            vec![[false, false], [false, true], [true, false], [true, true]]
        );
        for l in BellLabel::ALL {
            let [hi, lo] = l.code();
            assert_eq!(BellLabel::from_code(hi, lo), l);
            assert_eq!(l.label().parse::<BellLabel>().unwrap(), l);
        }
    }

    #[test]
    fn prepared_states_match_convention() {
        let r = FRAC_1_SQRT_2;
        let psi = prepare_bell(BellLabel::PsiPlus);
        let expected = [r, 0.0, 0.0, r];
        for (a, e) in psi.amplitudes().iter().zip(expected) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
        let phi = prepare_bell(BellLabel::PhiMinus);
        let expected = [0.0, r, -r, 0.0];
        for (a, e) in phi.amplitudes().iter().zip(expected) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
        for a in BellLabel::ALL {
            for b in BellLabel::ALL {
                let ip = prepare_bell(a).inner(&prepare_bell(b)).unwrap().norm();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for label in BellLabel::ALL {
            let sv = prepare_bell(label);
            let p = sv.bell_probabilities(0, 1).unwrap();
            assert!((p[label.index()] - 1.0).abs() < 1e-12);
            for _ in 0..20 {
                assert_eq!(sv.bell_measure(0, 1, &mut rng).unwrap().0, label);
            }
        }
    }

    #[test]
    fn product_state_splits_evenly_over_psi() {
        let zz = StateVector::from_states(&[CanonicalState::Zero, CanonicalState::Zero]).unwrap();
        let p = zz.bell_probabilities(0, 1).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
        assert!(p[2].abs() < 1e-12 && p[3].abs() < 1e-12);
    }

    #[test]
    fn cross_pair_marginal_is_uniform() {
        for a in BellLabel::ALL {
            for b in BellLabel::ALL {
                let sv = prepare_bell(a).tensor(&prepare_bell(b));
                // one half of each pair
                let p = sv.bell_probabilities(0, 2).unwrap();
                for x in p {
                    assert!((x - 0.25).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pair_errors() {
        let sv = prepare_bell(BellLabel::PsiPlus);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            sv.bell_measure(0, 0, &mut rng).unwrap_err(),
            QuantumError::SameQubit(0)
        );
        assert!(sv.bell_measure(0, 2, &mut rng).is_err());
    }

    #[test]
    fn contract_pair_recovers_rest() {
        let sv = CanonicalState::Minus
            .vector()
            .tensor(&prepare_bell(BellLabel::PhiMinus));
        let rest = sv
            .contract_pair(1, 2, BellLabel::PhiMinus.amplitudes())
            .unwrap();
        assert_eq!(rest, CanonicalState::Minus.vector());
    }
}
