//! End-to-end tests of the binary: JSON contracts, exit codes,
//! reproducibility, and the trace log.

use std::process::{Command, Output};

use serde_json::Value;

fn stabtest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabtest"))
        .args(args)
        .output()
        .expect("spawn stabtest")
}

fn json_of(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("JSON on stdout")
}

#[test]
fn stabvalue_prints_exact_and_float() {
    let out = stabtest(&["stabvalue", "--n", "2", "--K", "10"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema"], "stabtest/stabvalue-v1");
    assert_eq!(v["value_rational"], "174251/327680");
    assert!((v["value_float"].as_f64().unwrap() - 0.5317718505859375).abs() < 1e-15);
}

#[test]
fn qnk_lists_the_two_qubit_distribution() {
    let out = stabtest(&["qnk", "--n", "2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["total_lagrangians"], "15");
    let rationals: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["rational"].as_str().unwrap())
        .collect();
    assert_eq!(rationals, ["8/15", "2/5", "1/15"]);
}

#[test]
fn identical_argv_gives_identical_bytes() {
    let args = [
        "estimate",
        "--state",
        "stab:zero",
        "--n",
        "3",
        "--K",
        "15",
        "--trials",
        "400",
        "--seed",
        "42",
    ];
    let first = stabtest(&args);
    let second = stabtest(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn worker_count_does_not_change_output() {
    let base = [
        "estimate", "--state", "haar:9", "--n", "3", "--K", "15", "--trials", "300", "--seed", "5",
    ];
    let one = stabtest(&[&base[..], &["--workers", "1"]].concat());
    let four = stabtest(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn tester_exit_codes_accept_reject_error() {
    // Accepted stabilizer state: exit 0.
    let ok = stabtest(&[
        "test",
        "--state",
        "stab:zero",
        "--n",
        "3",
        "--epsilon",
        "0.4",
        "--delta",
        "0.2",
        "--seed",
        "2",
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    assert_eq!(json_of(&ok)["decision"], "stabilizer");

    // Far state: exit 1.
    let far = stabtest(&[
        "test",
        "--state",
        "product:T^3",
        "--epsilon",
        "0.4",
        "--delta",
        "0.2",
        "--seed",
        "2",
    ]);
    assert_eq!(far.status.code(), Some(1));
    let v = json_of(&far);
    assert_eq!(v["decision"], "far");
    assert_eq!(
        v["copies_used"].as_u64().unwrap(),
        2 * 15 * v["trials"].as_u64().unwrap()
    );

    // Epsilon below the usable minimum: structured error, exit 2.
    let err = stabtest(&[
        "test",
        "--state",
        "product:T^3",
        "--epsilon",
        "0.3",
        "--delta",
        "0.05",
        "--seed",
        "7",
    ]);
    assert_eq!(err.status.code(), Some(2));
    let v = json_of(&err);
    assert_eq!(v["schema"], "stabtest/error-v1");
    assert_eq!(v["kind"], "gap_non_positive");
}

#[test]
fn malformed_state_spec_is_a_structured_error() {
    let out = stabtest(&[
        "estimate",
        "--state",
        "bogus:thing",
        "--n",
        "2",
        "--K",
        "4",
        "--trials",
        "10",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["kind"], "parse");
}

#[test]
fn state_spec_qubit_mismatch_is_rejected() {
    let out = stabtest(&[
        "test",
        "--state",
        "product:T^3",
        "--n",
        "4",
        "--epsilon",
        "0.4",
        "--delta",
        "0.2",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["kind"], "qubit_mismatch");
}

#[test]
fn trace_flag_writes_per_trial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = stabtest(&[
        "estimate",
        "--state",
        "stab:zero",
        "--n",
        "2",
        "--K",
        "8",
        "--trials",
        "25",
        "--seed",
        "3",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,spanned,copies_used"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], i.to_string());
        assert!(fields[1] == "0" || fields[1] == "1");
        assert_eq!(fields[2], "16"); // 2K state copies per trial
    }
}

#[test]
fn file_state_round_trips_through_the_estimator() {
    use stabtest::statevec::StateVector;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    StateVector::t_state_power(2).save_json(&path).unwrap();

    let spec = format!("file:{}", path.display());
    let out = stabtest(&[
        "estimate", "--state", &spec, "--K", "10", "--trials", "50", "--seed", "8",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["n"], 2);
    assert_eq!(v["state"], spec.as_str());

    // A corrupt file is a structured error.
    std::fs::write(&path, b"{\"schema\": \"nope\"}").unwrap();
    let bad = stabtest(&[
        "estimate", "--state", &spec, "--K", "10", "--trials", "50", "--seed", "8",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_suite_reports_and_exit_zero() {
    let out = stabtest(&["verify", "q-limit", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], "stabtest/verify-v1");
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 3);

    let unknown = stabtest(&["verify", "nonsense", "--seed", "1"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn commutant_enumerate_counts_and_kinds() {
    let out = stabtest(&["commutant", "enumerate", "--t", "4"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["count"], 30);
    assert_eq!(v["count_formula"], 30);
    let kinds: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.iter().filter(|k| **k == "defective").count(), 6);
    assert_eq!(kinds.iter().filter(|k| **k == "identity").count(), 1);
}

#[test]
fn commutant_counterexample_passes_at_six_copies() {
    let out = stabtest(&["commutant", "counterexample", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["expectation"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["projector_rank"], "6");
    assert_eq!(v["symmetric_dim"], "7");
}

#[test]
fn commutant_pt_check_full_sweep() {
    let out = stabtest(&["commutant", "pt-check", "--t", "4", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["elements"], 24);
    assert_eq!(v["cases"], 24 * 16);
    assert_eq!(v["passed"], true);
    assert!(v["failures"].as_array().unwrap().is_empty());
}
