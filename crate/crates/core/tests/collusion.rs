//! What colluders learn by Bell-measuring a permuted EPR copy without the
//! owner's permutation, checked against a hand-built tensor oracle.

use qsa_core::adversary::disordered_guess_probability;
use qsa_core::harness::run_trials_seeded;
use qsa_core::scenario::{BidSource, PermutationPolicy, RandomKeyword};
use qsa_core::{AttackDescriptor, Bid, Permutation, Scenario};

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Real two-qubit amplitudes of the Bell state carrying bits `(hi, lo)`:
/// 00 -> (|00>+|11>), 01 -> (|00>-|11>), 10 -> (|01>+|10>), 11 -> (|01>-|10>).
fn bell(hi: bool, lo: bool) -> [f64; 4] {
    let s = if lo { -R } else { R };
    if hi {
        [0.0, R, s, 0.0]
    } else {
        [R, 0.0, 0.0, s]
    }
}

/// Four-qubit state of two Bell pairs on positions (0,1) and (2,3); qubit 0
/// is the most significant index bit.
fn two_pairs(bits: [bool; 4]) -> [f64; 16] {
    let a = bell(bits[0], bits[1]);
    let b = bell(bits[2], bits[3]);
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = a[i] * b[j];
        }
    }
    out
}

/// Moves the qubit at source position `map[k]` to position `k`.
fn permute(state: &[f64; 16], map: &[usize; 4]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (src_idx, amp) in state.iter().enumerate() {
        let bit = |q: usize| (src_idx >> (3 - q)) & 1;
        let dst: usize = (0..4).map(|k| bit(map[k]) << (3 - k)).sum();
        out[dst] = *amp;
    }
    out
}

fn oracle(bits: [bool; 4], map: &[usize; 4]) -> f64 {
    let ordered = two_pairs(bits);
    let held = permute(&ordered, map);
    let overlap: f64 = ordered.iter().zip(&held).map(|(a, b)| a * b).sum();
    overlap * overlap
}

fn all_maps() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let m = [a, b, c, d];
                    let mut seen = [false; 4];
                    m.iter().for_each(|x| seen[*x] = true);
                    if seen.iter().all(|s| *s) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

fn splits(map: &[usize; 4]) -> bool {
    // no aligned slot pair holds both halves of one source pair
    map[0] / 2 != map[1] / 2 && map[2] / 2 != map[3] / 2
}

fn all_bits() -> Vec<[bool; 4]> {
    (0..16)
        .map(|x: usize| [x & 8 != 0, x & 4 != 0, x & 2 != 0, x & 1 != 0])
        .collect()
}

#[test]
fn library_agrees_with_oracle_for_every_bid_and_order() {
    for map in all_maps() {
        let perm = Permutation::new(map.to_vec()).unwrap();
        assert_eq!(perm.splits_pairs(), splits(&map));
        for bits in all_bits() {
            let bid = Bid::new(bits.to_vec()).unwrap();
            let got = disordered_guess_probability(&bid, &perm).unwrap();
            assert!((got - oracle(bits, &map)).abs() < 1e-12, "{map:?} {bid}");
        }
    }
}

#[test]
fn guess_probabilities_by_permutation_class() {
    let maps = all_maps();
    let splitting: Vec<_> = maps.iter().filter(|m| splits(m)).collect();
    assert_eq!(splitting.len(), 16);
    for m in &splitting {
        for bits in all_bits() {
            // entanglement swapping: one uniform label fixes the other
            assert!((oracle(bits, m) - 0.25).abs() < 1e-12, "{m:?}");
        }
    }
    assert!((oracle([true, false, true, true], &[0, 1, 2, 3]) - 1.0).abs() < 1e-12);
    let mean: f64 = maps
        .iter()
        .flat_map(|m| all_bits().into_iter().map(move |b| oracle(b, m)))
        .sum::<f64>()
        / (maps.len() * 16) as f64;
    assert!((mean - 0.375).abs() < 1e-12, "{mean}");
}

fn collusion_scenario(policy: PermutationPolicy) -> Scenario {
    let mut s = Scenario::example3();
    s.bids = BidSource::Random(RandomKeyword::Random);
    s.carriers = None;
    s.permutations = None;
    s.permutation_policy = policy;
    s.attack = Some(AttackDescriptor::Collusion { colluders: vec![2] });
    s
}

#[test]
fn simulated_guess_rate_matches_oracle() {
    for (policy, p) in [
        (PermutationPolicy::PairSplitting, 0.25),
        (PermutationPolicy::Uniform, 0.375),
    ] {
        let stats = run_trials_seeded(&collusion_scenario(policy), 10_000, 77).unwrap();
        assert_eq!(stats.collusion_success.trials, 10_000);
        assert!(
            stats.collusion_success.within_sigmas(p, 3.0),
            "{policy:?}: {:?}",
            stats.collusion_success
        );
    }
}

#[test]
fn guess_beats_blind_baseline() {
    // blind guessing of a 4-bit bid succeeds with 1/16
    let stats = run_trials_seeded(
        &collusion_scenario(PermutationPolicy::PairSplitting),
        2_000,
        3,
    )
    .unwrap();
    assert!(stats.collusion_success.ci99_low > 1.0 / 16.0);
}

#[test]
fn fixed_identity_order_leaks_everything() {
    let mut s = collusion_scenario(PermutationPolicy::Uniform);
    s.permutations = Some(vec![Permutation::identity(4), Permutation::identity(4)]);
    let stats = run_trials_seeded(&s, 500, 1).unwrap();
    assert_eq!(stats.collusion_success.count, 500);
}
