use std::collections::BTreeMap;
use std::fs;
use std::process::{Command, Output};

use dualinv::harness::{
    emit_json, emit_markdown, replay, run_suite, Counterexample, FindingPolicy, Report, Row, Status, Suite,
    SuiteConfig, SuiteReport, Summary,
};
use dualinv::space::Family;
use serde_json::Value;

fn dualinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualinv")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SMALL: &[&str] = &["--samples", "12", "--seed", "5", "--family", "symplectic,general-linear"];

#[test]
fn verify_is_byte_deterministic() {
    let args: Vec<&str> = [&["verify", "identity", "cayley"], SMALL].concat();
    let a = dualinv(&args);
    let b = dualinv(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["summary"]["fail"], 0);
}

#[test]
fn seed_is_recorded_but_does_not_change_outcomes() {
    let run = |seed: &str| -> Value {
        let out = dualinv(&["verify", "cayley", "--samples", "8", "--seed", seed, "--family", "orthogonal"]);
        serde_json::from_slice(&out.stdout).unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_eq!(a["summary"], b["summary"]);
    assert_ne!(a["suites"][0]["parameters"], b["suites"][0]["parameters"]);
}

#[test]
fn invalid_level_is_a_configuration_error() {
    let out = dualinv(&["verify", "level", "--level", "2", "--precision", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_suite_and_family_are_configuration_errors() {
    assert_eq!(dualinv(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(dualinv(&["verify", "identity", "--family", "spin"]).status.code(), Some(2));
    assert_eq!(dualinv(&["verify", "identity", "--prime", "4"]).status.code(), Some(2));
}

#[test]
fn empty_suite_list_gives_an_empty_passing_report() {
    let out = dualinv(&["verify", "--suite", ""]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"].as_array().unwrap().len(), 0);
    assert_eq!(report["summary"]["rows"], 0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# small run\nsuite = cayley\nfamily = hermitian\nsamples = 3\nseed = 9\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file: Value = serde_json::from_slice(&dualinv(&["verify", "--config", cfg]).stdout).unwrap();
    let rows = from_file["suites"][0]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["target"] == "hermitian/2" && r["runs"] == 3));

    let overridden: Value = serde_json::from_slice(
        &dualinv(&["verify", "--config", cfg, "--samples", "4", "--family", "symplectic"]).stdout,
    )
    .unwrap();
    let rows = overridden["suites"][0]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["target"] == "symplectic/2" && r["runs"] == 4));
}

#[test]
fn output_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = dualinv(&["verify", "level", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["summary"]["fail"], 0);
}

#[test]
fn json_and_markdown_carry_the_same_rows() {
    let args: Vec<&str> = [&["verify", "hypothesis"], SMALL].concat();
    let json: Value = serde_json::from_slice(&dualinv(&args).stdout).unwrap();
    let md = stdout(&dualinv(&[args.as_slice(), &["--format", "markdown"]].concat()));
    let table_rows: Vec<Vec<String>> = md
        .lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| check"))
        .map(|l| l.trim_matches('|').split(" | ").map(|c| c.trim().to_string()).collect())
        .collect();
    let json_rows = json["suites"][0]["rows"].as_array().unwrap();
    assert_eq!(table_rows.len(), json_rows.len());
    for (t, j) in table_rows.iter().zip(json_rows) {
        assert_eq!(t[0], j["check"].as_str().unwrap());
        assert_eq!(t[1], j["target"].as_str().unwrap());
        assert_eq!(t[2], j["status"].as_str().unwrap());
        assert_eq!(t[3], j["runs"].to_string());
        assert_eq!(t[4], j["failures"].to_string());
    }
}

#[test]
fn finite_dual_reports_symplectic_classes() {
    let out = dualinv(&["finite-dual", "--groups", "sp:2:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &v["reports"][0];
    assert_eq!(r["order"], 24);
    assert_eq!(r["class_count"], 7);
    assert_eq!(r["rows"].as_array().unwrap().iter().filter(|row| row["status"] == "pass").count(), 7);
}

#[test]
fn decompose_partitions_the_identity_coset() {
    let out = dualinv(&["decompose", "--precision", "2", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let sizes: u64 = v["pieces"].as_array().unwrap().iter().map(|p| p["size"].as_u64().unwrap()).sum();
    assert_eq!(sizes, v["members"].as_u64().unwrap());
}

fn sample_counterexample(check: &str, index: u64) -> Counterexample {
    Counterexample {
        check: check.into(),
        family: Family::Symplectic,
        dim: 2,
        prime: 3,
        precision: 2,
        level: 1,
        seed: 5,
        index,
        group: None,
        input: String::new(),
        message: String::new(),
    }
}

fn failing_report() -> Report {
    let cx = Counterexample {
        input: "X = [[1, 0], [0, -1]]".into(),
        message: "mu(c(X)) = 4 but (1 + alpha)^-2 = 1".into(),
        ..sample_counterexample("multiplier-identity", 7)
    };
    let row = Row {
        check: cx.check.clone(),
        target: "symplectic/2".into(),
        status: Status::Fail,
        runs: 10,
        failures: 1,
        counterexample: Some(cx),
        millis: None,
    };
    let summary = Summary { rows: 1, pass: 0, fail: 1, finding: 0 };
    Report::new(vec![SuiteReport { suite: Suite::Cayley, parameters: BTreeMap::new(), rows: vec![row], summary }])
}

#[test]
fn failing_row_sets_exit_one_and_carries_its_payload() {
    let report = failing_report();
    assert_eq!(report.exit_code(FindingPolicy::Fail), 1);
    assert_eq!(report.exit_code(FindingPolicy::Warn), 1);
    let json: Value = serde_json::from_str(&emit_json(&report)).unwrap();
    let cx: Counterexample = serde_json::from_value(json["suites"][0]["rows"][0]["counterexample"].clone()).unwrap();
    assert_eq!(cx.index, 7);
    assert_eq!(cx.seed, 5);
    assert!(emit_markdown(&report).contains("index 7"));
}

#[test]
fn replay_reruns_the_recorded_sample() {
    let config = SuiteConfig {
        suites: vec![Suite::Cayley],
        families: Some(vec![Family::Symplectic]),
        samples: 10,
        seed: 5,
        ..SuiteConfig::default()
    };
    let full = run_suite(&config).unwrap();
    let original = full.rows().find(|r| r.check == "multiplier-identity").unwrap();

    let replayed = replay(&sample_counterexample("multiplier-identity", 7)).unwrap();
    let row = replayed.rows().next().unwrap();
    assert_eq!(row.check, original.check);
    assert_eq!(row.target, original.target);
    assert_eq!(row.status, original.status);
    assert_eq!(row.runs, 1);
    assert_eq!(
        replay(&sample_counterexample("multiplier-identity", 7)).unwrap().rows().next().unwrap().status,
        row.status
    );
}

#[test]
fn replay_accepts_single_payloads_and_whole_reports() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("cx.json");
    fs::write(&single, emit_json(&sample_counterexample("theta-involution", 3))).unwrap();
    let out = dualinv(&["replay", single.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["rows"], 1);

    let report = dir.path().join("report.json");
    fs::write(&report, emit_json(&failing_report())).unwrap();
    let out = dualinv(&["replay", report.to_str().unwrap(), "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("| multiplier-identity | symplectic/2 | pass | 1 | 0 |"));
}

#[test]
fn replay_of_an_unknown_check_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cx.json");
    fs::write(&path, emit_json(&sample_counterexample("no-such-check", 0))).unwrap();
    assert_eq!(dualinv(&["replay", path.to_str().unwrap()]).status.code(), Some(2));
}
