use std::fs;
use std::process::{Command, Output};

use ineq_forge::report::{ProbeJson, VerificationJson};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ineq-forge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn without_timestamp(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

const HP_VERIFY: &[&str] = &[
    "verify", "--family", "hp", "--d", "4", "--alpha", "-1", "--N", "2", "--rin", "0.5", "--rout", "100",
    "--nodes", "250,500,1000",
];

#[test]
fn constants_line() {
    let o = run(&["constants", "--d", "3", "--alpha", "-5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"lambda\": 10.0}\n");

    let o = run(&["constants", "--d", "4", "--alpha", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"inequality_fails\": true"));
}

#[test]
fn weights_table() {
    let o = run(&["weights", "--family", "gaussian", "--d", "3", "--N", "4", "--t-grid", "0.01:0.9:50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,W_0,W_1,W_2,W_3,W_4,partial_sum"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 50);
    for r in &rows {
        assert_eq!(r.len(), 7);
        let sum: f64 = r[1..6].iter().sum();
        assert!((sum - r[6]).abs() <= 1e-10 * r[6].abs().max(1.0), "{r:?}");
    }
}

#[test]
fn empty_grid_gives_header_only() {
    let o = run(&["weights", "--family", "gaussian", "--d", "3", "--N", "2", "--t-grid", "0.1:0.5:0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "t,W_0,W_1,W_2,partial_sum\n");
}

#[test]
fn verify_round_trips_through_schema() {
    let o = run(HP_VERIFY);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let r: VerificationJson = serde_json::from_str(&text).unwrap();
    assert_eq!(r.command, "verify");
    assert_eq!(serde_json::to_value(&r).unwrap()["verdict"], "verified");
    assert_eq!(r.steps.len(), 3);
    assert_eq!(r.grid, 1000);
    let again: VerificationJson = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(again, r);
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let a = bin().args(HP_VERIFY).env("INEQ_FORGE_THREADS", "1").output().unwrap();
    let b = bin().args(HP_VERIFY).env("INEQ_FORGE_THREADS", "3").output().unwrap();
    assert_eq!(without_timestamp(&stdout(&a)), without_timestamp(&stdout(&b)));
}

#[test]
fn falsify_returns_witness() {
    let args = [
        "falsify", "--family", "gaussian", "--d", "3", "--N", "0", "--eps", "0", "--quadratic", "0.01", "--nodes", "1000",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: VerificationJson = serde_json::from_str(&stdout(&o)).unwrap();
    let w = r.witness.expect("witness");
    assert!(w.valid);
    assert!(!w.nodes.is_empty());
    assert_eq!(w.nodes.len(), w.values.len());
    assert!(w.quadratic_form < 0.0);

    let again = run(&args);
    assert_eq!(without_timestamp(&stdout(&o)), without_timestamp(&stdout(&again)));
}

#[test]
fn failing_truncation_exits_one() {
    let o = run(&[
        "verify", "--family", "gaussian", "--d", "5", "--N", "1", "--rin", "0.01", "--rout", "6", "--nodes", "250,500,1000",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn probe_round_trip_and_flag() {
    let o = run(&["probe", "--family", "hardy", "--d", "3", "--level", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p: ProbeJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!p.exceeds_optimal);
    let again: ProbeJson = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(again, p);

    let o = run(&["probe", "--family", "hardy", "--d", "3", "--level", "1", "--candidate", "inflated"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn identity_passes() {
    let o = run(&["identity", "--family", "hp", "--d", "4", "--alpha", "-1", "--N", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# constants run\ncommand = constants\nd = 3\nalpha = -5\n").unwrap();
    let c = cfg.to_str().unwrap();

    let o = run(&["--config", c]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "{\"lambda\": 10.0}\n");

    let o = run(&["--config", c, "constants", "--alpha", "-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_ne!(v["lambda"], 10.0);
}

#[test]
fn unknown_config_key_lists_valid_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "command=verify\nfamily=hp\nradius=3\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("radius"), "{e}");
    assert!(e.contains("rin") && e.contains("rout") && e.contains("nodes"), "{e}");
}

#[test]
fn invalid_parameters_are_usage_errors() {
    let o = run(&["weights", "--family", "hp-plane", "--alpha", "-1", "--beta", "0.4", "--t-star", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("beta"), "{}", stderr(&o));

    let o = run(&["verify", "--family", "hardy", "--d", "3", "--rout", "1"]);
    assert_eq!(o.status.code(), Some(3));

    let o = bin().args(["constants", "--d", "3", "--alpha", "0"]).env("INEQ_FORGE_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_file_and_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["constants", "--d", "3", "--alpha", "-5", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert_eq!(fs::read_to_string(&out).unwrap(), "{\"lambda\": 10.0}\n");

    let missing = dir.path().join("no/such/dir/c.json");
    let o = run(&["constants", "--d", "3", "--alpha", "-5", "--output", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
