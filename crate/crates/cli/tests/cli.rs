use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pqsum_cli::config::{ExperimentConfig, ExperimentKind};
use pqsum_cli::experiments::run_experiment;

fn pqsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqsum")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn value(out: &Output) -> f64 {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    v["value"].as_f64().unwrap()
}

#[test]
fn norm_examples() {
    let dir = tempfile::tempdir().unwrap();
    let scalar = write(dir.path(), "s.json", r#"{"rows":1,"cols":1,"entries":[2.0],"domain_exp":"2","codomain_exp":"2"}"#);
    assert!((value(&pqsum(&["norm", "--matrix", &scalar, "--p", "2", "--q", "2", "--k", "1"])) - 2.0).abs() < 1e-12);
    let id = write(dir.path(), "id.json", r#"{"rows":2,"cols":2,"entries":[[1,0],[0,1]],"domain_exp":"2","codomain_exp":"2"}"#);
    assert!((value(&pqsum(&["norm", "--matrix", &id, "--p", "2", "--q", "2", "--k", "2"])) - 2f64.sqrt()).abs() < 1e-9);
    assert!((value(&pqsum(&["norm", "--matrix", &id])) - 1.0).abs() < 1e-12);

    let out = pqsum(&["norm", "--matrix", &id, "--p", "2", "--q", "2", "--witness"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["witness"]["vectors"].as_array().unwrap().len(), 2);
}

#[test]
fn norm_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    let out = pqsum(&["norm", "--matrix", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let id = write(dir.path(), "id.json", r#"{"rows":2,"cols":2,"entries":[1,0,0,1],"domain_exp":"2","codomain_exp":"2"}"#);
    assert_eq!(pqsum(&["norm", "--matrix", &id, "--p", "1", "--q", "2"]).status.code(), Some(2));
    assert_eq!(pqsum(&["norm", "--matrix", &id, "--p", "2"]).status.code(), Some(2));
    assert_eq!(pqsum(&["norm", "--matrix", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn empty_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "experiment = \"identity_l2_growth\"\n[grid]\nn = []\n");
    let out = pqsum(&["experiment", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
    let cfg = write(dir.path(), "c.json", r#"{"experiment": "bennett_ratio", "seeds": []}"#);
    assert_eq!(pqsum(&["experiment", &cfg]).status.code(), Some(2));
    let cfg = write(dir.path(), "d.json", r#"{"experiment": "nope"}"#);
    assert_eq!(pqsum(&["experiment", &cfg]).status.code(), Some(2));
}

#[test]
fn csv_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write(dir.path(), "t.toml", "experiment = \"tomczak_suite\"\nseeds = [0, 1]\n[grid]\nn = [1, 2]\nm = [3]\n[ascent]\nstarts = 6\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(pqsum(&["--threads", "1", "--out", a.to_str().unwrap(), "experiment", &cfg]).status.success());
    assert!(pqsum(&["--threads", "4", "--out", b.to_str().unwrap(), "experiment", &cfg]).status.success());
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# pqsum "));
    assert!(text.contains("# seeds=0,1\n"));
    let again = pqsum(&["experiment", &cfg]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn columns_depend_only_on_the_tag() {
    let mut small = ExperimentConfig::new(ExperimentKind::QuotientSuite);
    small.seeds = Some(vec![0]);
    let mut large = small.clone();
    large.seeds = Some(vec![0, 1, 2]);
    let (a, b) = (run_experiment(&small).unwrap(), run_experiment(&large).unwrap());
    assert_eq!(a.columns, b.columns);
    assert!(b.rows.len() > a.rows.len());
    assert!(b.rows.iter().all(|r| r.len() == b.columns.len()));
}

#[test]
fn verify_suites() {
    let out = pqsum(&["verify", "kwapien", "--cases", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] kwapien"));
    assert!(pqsum(&["verify", "tomczak", "--cases", "12"]).status.success());
    assert_eq!(pqsum(&["verify", "unknown"]).status.code(), Some(2));
}

#[test]
fn cotype_command() {
    let dir = tempfile::tempdir().unwrap();
    let embed = write(dir.path(), "e.json", r#"{"embed":{"rows":2,"cols":2,"entries":[[1,0],[0,1]],"domain_exp":"2","codomain_exp":"2"}}"#);
    assert!((value(&pqsum(&["cotype", "--embed", &embed, "--q", "2"])) - 1.0).abs() < 1e-6);
    assert_eq!(pqsum(&["cotype", "--embed", &embed, "--q", "1"]).status.code(), Some(2));
    assert_eq!(pqsum(&["cotype", "--embed", &embed, "--q", "2", "--chain"]).status.code(), Some(2));
}
