//! Whole-run guarantees: completeness without an adversary, abort safety
//! under attack, and scenario validation.

use qsa_core::protocol::{EventKind, Step, Verdict};
use qsa_core::scenario::{parse_scenario, BidSource, RandomKeyword};
use qsa_core::seed::derive_seed;
use qsa_core::{run_auction_seeded, AttackDescriptor, BasisPolicy, Channel, Scenario};

fn random_scenario(n_parties: usize, bid_length: usize) -> Scenario {
    let mut s = Scenario::example3();
    s.n_parties = n_parties;
    s.bid_length = bid_length;
    s.bids = BidSource::Random(RandomKeyword::Random);
    s.carriers = None;
    s.permutations = None;
    s
}

#[test]
fn honest_runs_complete_with_the_true_maximum() {
    let mut s = random_scenario(4, 6);
    s.tie_policy = qsa_core::protocol::TiePolicy::LowestId;
    for i in 0..1000 {
        let (outcome, _) = run_auction_seeded(&s, derive_seed(11, i)).unwrap();
        assert_eq!(outcome.verdict, Verdict::Completed, "seed index {i}");
        let max = outcome.true_bids.values().max().unwrap();
        assert_eq!(outcome.announced_bid.as_ref(), Some(max));
        assert_eq!(outcome.decoded_bids, outcome.true_bids);
        assert_eq!(outcome.post_confirmations.len(), 2);
        assert!(outcome.post_confirmations.iter().all(|p| p.pass));
        assert!(outcome.checks.iter().all(|c| c.pass && c.error_rate == 0.0));
    }
}

#[test]
fn pass_through_tap_never_disturbs() {
    for channel in [Channel::S2, Channel::S5, Channel::S6] {
        let mut s = random_scenario(3, 4);
        s.attack = Some(AttackDescriptor::PassThrough {
            targets: vec![1, 2],
            channel,
        });
        for i in 0..200 {
            let (outcome, _) = run_auction_seeded(&s, i).unwrap();
            assert!(outcome.checks.iter().all(|c| c.mismatches == 0));
            assert_eq!(outcome.decoded_bids, outcome.true_bids);
        }
    }
}

/// After a failed check nothing bid-bearing may travel: no EPR sequences
/// after a failed carrier check, no returned carriers after a failed EPR
/// check.
#[test]
fn failed_checks_stop_all_bid_traffic() {
    let mut aborted = 0;
    for (channel, policy) in [
        (Channel::S2, BasisPolicy::FixedZ),
        (Channel::S5, BasisPolicy::UniformXy),
    ] {
        let mut s = random_scenario(4, 4);
        s.attack = Some(AttackDescriptor::InterceptResend {
            basis_policy: policy,
            targets: vec![2],
            channel,
        });
        for i in 0..300 {
            let (outcome, transcript) = run_auction_seeded(&s, i).unwrap();
            let Some(failed) = transcript.events.iter().position(|e| {
                e.kind == EventKind::Check && e.step < Step::S7 && e.payload["pass"] == false
            }) else {
                continue;
            };
            aborted += 1;
            assert_eq!(outcome.verdict, Verdict::AbortedChannelCheck);
            let fail_step = transcript.events[failed].step;
            assert!(transcript.events[failed..].iter().all(|e| {
                e.kind != EventKind::Qsend || e.step == fail_step && e.step != Step::S5
            }));
            assert!(transcript
                .of_kind(Step::S6, EventKind::Qsend)
                .next()
                .is_none());
            assert!(outcome.winner.is_none());
        }
    }
    assert!(aborted > 100);
}

#[test]
fn unattacked_s6_cnot_shows_as_decode_errors() {
    // the return leg carries no decoys, so the tap is only visible in
    // the decoded bids
    let mut s = random_scenario(3, 4);
    s.attack = Some(AttackDescriptor::Cnot {
        targets: vec![1],
        channel: Channel::S6,
    });
    let misdecoded = (0..200)
        .filter(|i| {
            let (o, _) = run_auction_seeded(&s, *i).unwrap();
            o.decoded_bids != o.true_bids
        })
        .count();
    assert!(misdecoded > 50, "{misdecoded}");
}

#[test]
fn scenario_errors_name_the_field() {
    let cases = [
        (
            r#"{"schema_version":1,"n_parties":3,"bid_length":5,"bids":"random","decoy_rate":0.5}"#,
            "bid_length must be even",
        ),
        (
            r#"{"schema_version":1,"n_parties":3,"bid_length":4,"bids":["1011","0111","0000"],"decoy_rate":0.5}"#,
            "bids",
        ),
        (
            r#"{"schema_version":1,"n_parties":3,"bid_length":4,"bids":"random","decoy_rate":1.5}"#,
            "decoy_rate",
        ),
        (
            r#"{"schema_version":1,"n_parties":2,"bid_length":4,"bids":"random","decoy_rate":0.5}"#,
            "n_parties",
        ),
        (
            r#"{"schema_version":1,"n_parties":3,"bid_length":4,"bids":"random","decoy_rate":0.5,"carriers":["0 1 + +y","0 0 0 0"]}"#,
            "not a carrier state",
        ),
        (
            r#"{"schema_version":1,"n_parties":3,"bid_length":4,"bids":"random","decoy_rate":0.5,"carriers":["0 1 + -"]}"#,
            "carriers",
        ),
    ];
    for (text, needle) in cases {
        let err = parse_scenario(text)
            .and_then(|s| s.validate().map(|_| s))
            .unwrap_err();
        assert!(
            err.to_string().contains(needle),
            "{err} should mention {needle}"
        );
    }
}
