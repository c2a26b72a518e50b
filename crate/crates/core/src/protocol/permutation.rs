use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ProtocolError;
use crate::quantum::StateVector;

/// Secret reordering of a qubit sequence: position `i` of the output holds
/// the element that was at `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, ProtocolError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(ProtocolError::InvalidPermutation(format!(
                    "{map:?} is not a bijection on 0..{n}"
                )));
            }
        }
        Ok(Permutation { map })
    }

    pub fn identity(len: usize) -> Self {
        Permutation {
            map: (0..len).collect(),
        }
    }

    /// Uniform over all `len!` orderings.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..len).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    /// Uniform over the orderings in which no aligned output pair
    /// `(2g, 2g+1)` holds both halves of one input pair. With fewer than
    /// four positions no such ordering exists and this falls back to
    /// [`Permutation::random`].
    pub fn random_pair_splitting<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        if len < 4 {
            return Self::random(len, rng);
        }
        loop {
            let p = Self::random(len, rng);
            if p.splits_pairs() {
                return p;
            }
        }
    }

    /// True iff no aligned output pair is an input pair.
    pub fn splits_pairs(&self) -> bool {
        self.map
            .chunks_exact(2)
            .all(|pair| pair[0] / 2 != pair[1] / 2)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &src) in self.map.iter().enumerate() {
            inv[src] = i;
        }
        Permutation { map: inv }
    }

    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>, ProtocolError> {
        if items.len() != self.map.len() {
            return Err(ProtocolError::LengthMismatch {
                what: "permutation",
                expected: self.map.len(),
                found: items.len(),
            });
        }
        Ok(self.map.iter().map(|&src| items[src].clone()).collect())
    }

    /// Moves qubit `map[i]` of the register to position `i`.
    pub fn apply_state(&self, sv: &StateVector) -> Result<StateVector, ProtocolError> {
        if sv.n_qubits() != self.map.len() {
            return Err(ProtocolError::LengthMismatch {
                what: "permutation",
                expected: self.map.len(),
                found: sv.n_qubits(),
            });
        }
        Ok(sv.permute_qubits(&self.map)?)
    }

    /// One-indexed source listing, e.g. "1324". Sequences longer than nine
    /// are space-separated.
    pub fn order_string(&self) -> String {
        let items: Vec<String> = self.map.iter().map(|m| (m + 1).to_string()).collect();
        if self.map.len() <= 9 {
            items.concat()
        } else {
            items.join(" ")
        }
    }

    pub fn from_order_string(s: &str) -> Result<Self, ProtocolError> {
        let bad = || ProtocolError::InvalidPermutation(format!("cannot parse order {s:?}"));
        let one_indexed: Vec<usize> = if s.trim().contains(char::is_whitespace) {
            s.split_whitespace()
                .map(|t| t.parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            s.trim()
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        if one_indexed.is_empty() || one_indexed.contains(&0) {
            return Err(bad());
        }
        Permutation::new(one_indexed.into_iter().map(|m| m - 1).collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.order_string())
    }
}

impl FromStr for Permutation {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Permutation::from_order_string(s)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.order_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{prepare_bell, BellLabel, CanonicalState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn order_strings_are_one_indexed_sources() {
        let p: Permutation = "1324".parse().unwrap();
        assert_eq!(p.map(), &[0, 2, 1, 3]);
        let q: Permutation = "4123".parse().unwrap();
        assert_eq!(q.map(), &[3, 0, 1, 2]);
        assert_eq!(
            q.apply(&["a", "b", "c", "d"]).unwrap(),
            vec!["d", "a", "b", "c"]
        );
        assert_eq!(q.to_string(), "4123");
        let long = Permutation::identity(10);
        assert_eq!(long.order_string(), "1 2 3 4 5 6 7 8 9 10");
        assert_eq!(long.order_string().parse::<Permutation>().unwrap(), long);
        assert!("1224".parse::<Permutation>().is_err());
        assert!("0123".parse::<Permutation>().is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
    }

    #[test]
    fn example_orders_split_epr_partners() {
        for s in ["1324", "4123"] {
            let p: Permutation = s.parse().unwrap();
            assert!(p.splits_pairs(), "{s}");
        }
        assert!(!Permutation::identity(4).splits_pairs());
        // partners moved but still adjacent
        assert!(!"2143".parse::<Permutation>().unwrap().splits_pairs());
    }

    #[test]
    fn permuting_bell_pairs_interleaves_partners() {
        let sv = prepare_bell(BellLabel::PhiPlus).tensor(&prepare_bell(BellLabel::PhiMinus));
        let p: Permutation = "1324".parse().unwrap();
        let out = p.apply_state(&sv).unwrap();
        // adjacent positions now hold halves of different pairs
        let probs = out.bell_probabilities(0, 1).unwrap();
        assert!(probs.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert_eq!(p.invert().apply_state(&out).unwrap(), sv);
    }

    #[test]
    fn identity_leaves_register_unchanged() {
        let sv = StateVector::from_states(&[
            CanonicalState::Plus,
            CanonicalState::One,
            CanonicalState::MinusY,
        ])
        .unwrap();
        assert_eq!(Permutation::identity(3).apply_state(&sv).unwrap(), sv);
    }

    #[test]
    fn inverse_undoes_random_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let states: Vec<CanonicalState> = (0..6)
            .map(|_| CanonicalState::ALL[rng.gen_range(0..6)])
            .collect();
        let sv = StateVector::from_states(&states).unwrap();
        for _ in 0..100 {
            let p = Permutation::random(6, &mut rng);
            let round = p
                .invert()
                .apply_state(&p.apply_state(&sv).unwrap())
                .unwrap();
            assert_eq!(round, sv);
        }
    }

    #[test]
    fn pair_splitting_sampler_only_returns_splitting_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..2000 {
            let p = Permutation::random_pair_splitting(4, &mut rng);
            assert!(p.splits_pairs());
            seen.insert(p);
        }
        // 16 of the 24 orderings of four positions split both pairs
        assert_eq!(seen.len(), 16);
    }
}
