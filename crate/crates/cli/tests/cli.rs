use std::process::Command;

fn qsa(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qsa"))
        .args(args)
        .output()
        .unwrap()
}

fn example() -> String {
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/scenarios/example3.json"
    )
    .to_string()
}

#[test]
fn single_run_prints_transcript() {
    let out = qsa(&["run", "--scenario", &example()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, String::from_utf8(qsa(&["example3"]).stdout).unwrap());
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with(r#"{"step":"S2","from":"Alice","to":"Bob","kind":"qsend""#));
}

#[test]
fn invalid_scenarios_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let odd = dir.path().join("odd.json");
    std::fs::write(
        &odd,
        r#"{"schema_version":1,"n_parties":3,"bid_length":5,"bids":"random","decoy_rate":0.5}"#,
    )
    .unwrap();
    let out = qsa(&["run", "--scenario", odd.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bid_length must be even"));

    let missing = qsa(&["run", "--scenario", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_attack = qsa(&[
        "attack",
        "--scenario",
        &example(),
        "--type",
        "collusion",
        "--colluders",
        "1,2",
        "--trials",
        "5",
    ]);
    assert_eq!(bad_attack.status.code(), Some(2));
}

#[test]
fn aborted_single_run_is_nonzero() {
    let out = qsa(&["run", "--scenario", &example(), "--seed", "1"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("false.json");
    let mut s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(example()).unwrap()).unwrap();
    s["attack"] =
        serde_json::json!({"attack": "false_announcement", "winner": 2, "fabricated_bid": "1111"});
    std::fs::write(&path, s.to_string()).unwrap();
    let out = qsa(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let last = String::from_utf8(out.stdout).unwrap();
    assert!(last
        .lines()
        .last()
        .unwrap()
        .contains("aborted_post_confirmation"));
}

#[test]
fn csv_report_has_metric_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.csv");
    let out = qsa(&[
        "run",
        "--scenario",
        &example(),
        "--trials",
        "50",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("metric,value,count,trials,ci99_low,ci99_high")
    );
    assert!(text.contains("\ncompletions,50,"));
    assert!(text.contains("\nxi,1,"));
}

#[test]
fn sweep_csv_lists_each_decoy_count() {
    let out = qsa(&[
        "attack",
        "--scenario",
        &example(),
        "--type",
        "cnot",
        "--sweep-decoys",
        "1,2,4",
        "--trials",
        "200",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let decoys: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(decoys, vec!["1", "2", "4"]);
}

#[test]
fn sweep_rejects_non_carrier_channel() {
    let out = qsa(&[
        "attack",
        "--scenario",
        &example(),
        "--type",
        "cnot",
        "--channel",
        "s6",
        "--sweep-decoys",
        "1",
        "--trials",
        "10",
    ]);
    assert!(!out.status.success());
}

#[test]
fn table2_text_lists_three_rows() {
    let out = qsa(&["table2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("GHZ"));
    assert!(text.contains("single-photon"));
}
