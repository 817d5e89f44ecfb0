use std::process::{Command, Output};

use qsym::harness::SuiteReport;

fn qsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsym"))
        .args(args)
        .env_remove("QSYM_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Real part of an `eval` text line `re + imi`.
fn real_part(o: &Output) -> f64 {
    stdout(o).split(" + ").next().unwrap().trim().parse().unwrap()
}

#[test]
fn eval_trivial_six_j() {
    let o = qsym(&["eval", "q6j", "--l1", "5.3", "--l2", "6.1", "--l3", "4.7", "--j12", "0", "--j23", "0", "--j123", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(real_part(&o), 1.0);
}

#[test]
fn eval_alpha_normalization() {
    let o = qsym(&["eval", "alpha", "--lambda", "5.3", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(real_part(&o), 1.0);
}

#[test]
fn eval_inadmissible_three_j_is_zero() {
    let o = qsym(&["eval", "q3j-psi", "--l1", "5.3", "--l2", "4.9", "--j", "3", "--k1", "1", "--k2", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(real_part(&o), 0.0);
}

#[test]
fn eval_qnum_json() {
    let o = qsym(&["--precision", "30", "eval", "qnum", "--x", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "qnum");
    assert_eq!(v["precision"], 30);
    assert!((v["re"].as_str().unwrap().parse::<f64>().unwrap() - 5.25).abs() < 1e-12);
}

#[test]
fn eval_rejects_bad_input() {
    let missing = qsym(&["eval", "alpha", "--lambda", "5.3"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&missing.stderr).lines().count(), 1);
    let bad_key = qsym(&["eval", "q6j", "--l1", "5.3", "--l2", "6.1", "--l3", "4.7", "--j12", "3", "--j23", "0", "--j123", "1"]);
    assert_eq!(bad_key.status.code(), Some(2));
    let low_precision = qsym(&["--precision", "8", "eval", "qnum", "--x", "1"]);
    assert_eq!(low_precision.status.code(), Some(2));
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qsym"))
        .args(["eval", "qnum", "--x", "1", "--format", "json"])
        .env("QSYM_PRECISION", "24")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["precision"], 24);
}

#[test]
fn verify_single_identity() {
    let o = qsym(&["verify", "--suite", "qsbe", "--trials", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: SuiteReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.results.len(), 1);
    assert_eq!(report.results[0].id, "QSBE");
    assert_eq!(report.results[0].trials, 5);
}

#[test]
fn verify_unknown_suite_is_invalid() {
    let o = qsym(&["verify", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn verify_report_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qsym(&[
        "verify", "--suite", "QBID*,ID1", "--trials", "3", "--seed", "11", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let report: SuiteReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.seed, 11);
    assert_eq!(report.regime, "real");
    assert_eq!(report.results.len(), 5);
    assert!(report.results.iter().all(|r| r.pass && r.wall_time_ms == 0));
    assert_eq!(report.to_json(), text);
}

#[test]
fn verify_text_report() {
    let o = qsym(&["verify", "--suite", "ID2", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("PASS") && l.contains("ID2")));
    assert!(text.ends_with("1 identities, 0 failed\n"));
}

#[test]
fn list_ledger() {
    let o = qsym(&["list", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rows.len() >= 30);
    let qsbe = rows.iter().find(|r| r["id"] == "QSBE").unwrap();
    assert!(qsbe["reference"].as_str().unwrap().contains("pentagon identity"));
    let mut ids: Vec<_> = rows.iter().map(|r| r["id"].as_str().unwrap()).collect();
    ids.dedup();
    assert_eq!(ids.len(), rows.len());
    let text = stdout(&qsym(&["list"]));
    assert_eq!(text.lines().count(), rows.len());
}
