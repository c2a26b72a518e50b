use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::adversary::{analytic_detection, AdversaryError, AttackDescriptor, Channel};
use crate::protocol::{run_auction_seeded, AuctionOutcome, EventKind, Step, Transcript, Verdict};
use crate::scenario::Scenario;
use crate::seed::derive_seed;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.5758293035489;

/// Wilson score interval for `count` successes out of `trials`.
pub fn wilson_interval(count: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = count as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// An observed frequency with its 99% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: u64,
    pub trials: u64,
    /// `count / trials`, or 0 when nothing was observed.
    pub value: f64,
    pub ci99_low: f64,
    pub ci99_high: f64,
}

impl Rate {
    pub fn new(count: u64, trials: u64) -> Self {
        let (ci99_low, ci99_high) = wilson_interval(count, trials, Z_99);
        let value = if trials == 0 {
            0.0
        } else {
            count as f64 / trials as f64
        };
        Rate {
            count,
            trials,
            value,
            ci99_low,
            ci99_high,
        }
    }

    /// One binomial standard error of `p` at this trial count.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn within_sigmas(&self, p: f64, sigmas: f64) -> bool {
        (self.value - p).abs() <= sigmas * self.standard_error(p)
    }
}

/// Order-independent sums over trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    completions: u64,
    channel_aborts: u64,
    post_confirmation_aborts: u64,
    ties: u64,
    detected: u64,
    decoys_checked: u64,
    decoy_mismatches: u64,
    bids_decoded: u64,
    bids_misdecoded: u64,
    announced: u64,
    guesses: u64,
    guesses_correct: u64,
    message_qubits: u64,
    bid_cbits: u64,
    decoy_qubits: u64,
    epr_qubits: u64,
}

impl Tally {
    fn of(outcome: &AuctionOutcome, transcript: &Transcript) -> Tally {
        let mut t = Tally {
            trials: 1,
            ..Tally::default()
        };
        match outcome.verdict {
            Verdict::Completed => t.completions = 1,
            Verdict::AbortedChannelCheck => t.channel_aborts = 1,
            Verdict::AbortedPostConfirmation => t.post_confirmation_aborts = 1,
            Verdict::Tie => t.ties = 1,
        }
        t.detected = outcome.channel_detected() as u64;
        for c in &outcome.checks {
            t.decoys_checked += c.checked as u64;
            t.decoy_mismatches += c.mismatches as u64;
        }
        for (party, decoded) in &outcome.decoded_bids {
            t.bids_decoded += 1;
            t.bids_misdecoded += (outcome.true_bids[party] != *decoded) as u64;
        }
        t.announced = outcome.announcement.is_some() as u64;
        t.guesses = outcome.collusion_guesses.len() as u64;
        t.guesses_correct = outcome
            .collusion_guesses
            .iter()
            .filter(|g| g.correct())
            .count() as u64;
        t.message_qubits = transcript.sum_field(Step::S6, EventKind::Qsend, "carriers");
        t.bid_cbits = transcript.sum_field(Step::S6, EventKind::Qsend, "bid_bits");
        t.decoy_qubits = transcript.sum_field(Step::S2, EventKind::Qsend, "decoys")
            + transcript.sum_field(Step::S5, EventKind::Qsend, "decoys");
        t.epr_qubits = transcript.sum_field(Step::S5, EventKind::Qsend, "epr_qubits");
        t
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            completions: self.completions + o.completions,
            channel_aborts: self.channel_aborts + o.channel_aborts,
            post_confirmation_aborts: self.post_confirmation_aborts + o.post_confirmation_aborts,
            ties: self.ties + o.ties,
            detected: self.detected + o.detected,
            decoys_checked: self.decoys_checked + o.decoys_checked,
            decoy_mismatches: self.decoy_mismatches + o.decoy_mismatches,
            bids_decoded: self.bids_decoded + o.bids_decoded,
            bids_misdecoded: self.bids_misdecoded + o.bids_misdecoded,
            announced: self.announced + o.announced,
            guesses: self.guesses + o.guesses,
            guesses_correct: self.guesses_correct + o.guesses_correct,
            message_qubits: self.message_qubits + o.message_qubits,
            bid_cbits: self.bid_cbits + o.bid_cbits,
            decoy_qubits: self.decoy_qubits + o.decoy_qubits,
            epr_qubits: self.epr_qubits + o.epr_qubits,
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Aggregate of many independent runs.
///
/// `completions + channel_aborts + post_confirmation_aborts + ties == trials`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub trials: u64,
    pub completions: u64,
    pub channel_aborts: u64,
    pub post_confirmation_aborts: u64,
    pub ties: u64,
    /// Runs in which at least one decoy check failed.
    pub detection: Rate,
    /// Mismatched decoys over all checked decoys.
    pub decoy_error: Rate,
    /// Wrongly decoded bids over all decoded bids.
    pub decode_error: Rate,
    /// Failed post-confirmations over runs with a winner announcement.
    pub post_confirmation_failure: Rate,
    /// Correct colluder guesses over all guesses.
    pub collusion_success: Rate,
    pub message_qubits: u64,
    pub bid_cbits: u64,
    pub decoy_qubits: u64,
    pub epr_qubits: u64,
    /// Bid-carrying qubits per conveyed bid bit.
    pub xi: Option<f64>,
    pub decoy_qubits_per_cbit: Option<f64>,
    pub epr_qubits_per_cbit: Option<f64>,
}

impl From<Tally> for RunStatistics {
    fn from(t: Tally) -> Self {
        RunStatistics {
            trials: t.trials,
            completions: t.completions,
            channel_aborts: t.channel_aborts,
            post_confirmation_aborts: t.post_confirmation_aborts,
            ties: t.ties,
            detection: Rate::new(t.detected, t.trials),
            decoy_error: Rate::new(t.decoy_mismatches, t.decoys_checked),
            decode_error: Rate::new(t.bids_misdecoded, t.bids_decoded),
            post_confirmation_failure: Rate::new(t.post_confirmation_aborts, t.announced),
            collusion_success: Rate::new(t.guesses_correct, t.guesses),
            message_qubits: t.message_qubits,
            bid_cbits: t.bid_cbits,
            decoy_qubits: t.decoy_qubits,
            epr_qubits: t.epr_qubits,
            xi: ratio(t.message_qubits, t.bid_cbits),
            decoy_qubits_per_cbit: ratio(t.decoy_qubits, t.bid_cbits),
            epr_qubits_per_cbit: ratio(t.epr_qubits, t.bid_cbits),
        }
    }
}

impl RunStatistics {
    /// Statistics of a single traced run.
    pub fn from_run(outcome: &AuctionOutcome, transcript: &Transcript) -> Self {
        Tally::of(outcome, transcript).into()
    }
}

/// Runs `trials` auctions seeded from the scenario's own seed.
pub fn run_trials(scenario: &Scenario, trials: u64) -> Result<RunStatistics, HarnessError> {
    run_trials_seeded(scenario, trials, scenario.seed)
}

/// Trial `i` runs with `derive_seed(master, i)`, so the result does not
/// depend on how trials are scheduled across threads.
pub fn run_trials_seeded(
    scenario: &Scenario,
    trials: u64,
    master: u64,
) -> Result<RunStatistics, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (outcome, transcript) = run_auction_seeded(scenario, derive_seed(master, i))?;
            Ok::<_, HarnessError>(Tally::of(&outcome, &transcript))
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.into())
}

/// One point of a decoy-count sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub decoys: usize,
    pub detection: Rate,
    pub analytic: f64,
    /// Distance from the analytic value in binomial standard errors.
    pub sigmas: f64,
}

/// Runs `attack` against `scenario` once per decoy count in `decoys`. The
/// count applies to carrier sequences, so the attack must tap that channel.
pub fn sweep_decoys(
    scenario: &Scenario,
    attack: &AttackDescriptor,
    decoys: &[usize],
    trials: u64,
    master: u64,
) -> Result<Vec<SweepPoint>, HarnessError> {
    if decoys.is_empty() {
        return Err(HarnessError::EmptySweep);
    }
    if !matches!(attack.tap(), Some((_, Channel::S2, _))) {
        return Err(AdversaryError::Unsupported(format!(
            "{} does not tap the carrier channel",
            attack.name()
        ))
        .into());
    }
    decoys
        .iter()
        .map(|&d| {
            let mut s = scenario.clone();
            s.decoy_rate = None;
            s.decoy_count = Some(d);
            s.attack = Some(attack.clone());
            let stats = run_trials_seeded(&s, trials, master)?;
            let analytic = analytic_detection(attack, d)?;
            let se = stats.detection.standard_error(analytic);
            let diff = stats.detection.value - analytic;
            let sigmas = if se > 0.0 {
                diff.abs() / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            Ok(SweepPoint {
                decoys: d,
                detection: stats.detection,
                analytic,
                sigmas,
            })
        })
        .collect()
}
