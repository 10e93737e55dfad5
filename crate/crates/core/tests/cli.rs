//! End-to-end runs of the `repeatcode` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn repeatcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repeatcode")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{
    "name": "cli-small",
    "channel": {"kind": "repeat", "pmf": {"type": "deletion", "d": 0.05}},
    "inner": {"block_len": 18, "candidates": 2, "mc_trials": 100},
    "outer": {"q": 3, "n_rs": 7, "k_rs": 3},
    "eta": 0.5,
    "trials": 60,
    "master_seed": 21
}"#;

#[test]
fn simulate_writes_outputs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = repeatcode(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    for f in ["trials.csv", "summary.json", "code.json", "params.json"] {
        assert_eq!(fs::read(runs[0].join(f)).unwrap(), fs::read(runs[1].join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(runs[0].join("trials.csv")).unwrap();
    assert!(csv.starts_with("# repeatcode trials v1\ntrial,success,"));
    assert_eq!(csv.lines().count(), 2 + 60);
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let code = dir.path().join("code.json");
    let o = repeatcode(&["search-inner", "--config", &cfg, "--out", code.to_str().unwrap()]);
    assert!(o.status.success());
    let message = "101100110";
    let o = repeatcode(&["encode", "--config", &cfg, "--code", code.to_str().unwrap(), "--message", message]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let x = String::from_utf8(o.stdout).unwrap();
    let o = repeatcode(&["decode", "--config", &cfg, "--code", code.to_str().unwrap(), "--input", x.trim()]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), message);

    // A decode that cannot succeed exits with 3.
    let o = repeatcode(&["decode", "--config", &cfg, "--code", code.to_str().unwrap(), "--input", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn infeasible_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    // 64 codewords of length 6 cannot all be balanced.
    let cfg = write(dir.path(), "cfg.json", &SMALL.replace("\"block_len\": 18", "\"block_len\": 6"));
    let o = repeatcode(&["simulate", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let o = repeatcode(&["scaling", "--config", &cfg, "--out", dir.path().join("s").to_str().unwrap(), "--sizes", "3:7:3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn info_rate_table_for_deletion() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rates.csv");
    let o = repeatcode(&["info-rate", "--deletion", "0.3", "--n-max", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert!((first[2].parse::<f64>().unwrap() - 0.7).abs() < 1e-6);
}

#[test]
fn lemma_checks_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "lemma.json",
        r#"{"trimming": {"d": 0.5, "n_max": 5}, "cutting": {"d": 0.1, "flip": 0.05, "n_max": 2, "trim_max": 1}}"#,
    );
    let o = repeatcode(&["lemma-checks", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("lemma_checks.json").exists());
}
