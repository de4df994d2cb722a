use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qtradeoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtradeoff")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const INSTANCE: &str = "3 2\n1 0 1\n0 1 1\n1 1 1\n2 1 0\n2 2 1\n";

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn solve_matches_reference_in_every_mode() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.txt", INSTANCE);
    for mode in ["exact", "cost-model", "statevector", "classical"] {
        let out = qtradeoff(&["solve", "--instance", &inst, "--space", "4", "--mode", mode, "--seed", "3"]);
        assert_eq!(code(&out), 0, "{mode}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        // A·x = (2, 1, 3) clamped by b = (2, 2, 1).
        assert_eq!(v["y"], serde_json::json!([2, 1, 1]));
        assert_eq!(v["correct"], true);
        assert!(v["ledger"]["total"].as_u64().unwrap() > 0);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "inst.txt", INSTANCE);
    let bad = write(&dir, "bad.txt", "2 1\n1 0\n");
    for args in [
        vec!["solve", "--instance", inst.as_str(), "--space", "4", "--mode", "bogus"],
        vec!["solve", "--instance", bad.as_str(), "--space", "4"],
        vec!["solve", "--instance", inst.as_str(), "--space", "0"],
        vec!["poly", "verify", "--suite", "nope"],
        vec!["subspace", "verify", "--n", "4", "--t", "3"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&qtradeoff(&args)), 2, "{args:?}");
    }
}

fn sweep_config(dir: &TempDir) -> String {
    write(
        dir,
        "sweep.json",
        r#"{"N": [16, 32, 64], "t": [2], "space": {"kind": "absolute", "values": [12]},
            "modes": ["exact", "cost-model", "classical"], "seeds": 3}"#,
    )
}

#[test]
fn sweep_is_reproducible_in_both_formats() {
    let dir = TempDir::new().unwrap();
    let cfg = sweep_config(&dir);
    for ext in ["csv", "json"] {
        let a = dir.path().join(format!("a.{ext}"));
        let b = dir.path().join(format!("b.{ext}"));
        for p in [&a, &b] {
            let out = qtradeoff(&["sweep", "--config", &cfg, "--out", p.to_str().unwrap(), "--format", ext]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
    let csv = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,t,S,mode,seed,T,queries_x,queries_b,space,correct"));
    assert_eq!(lines.count(), 3 * 3 * 3);
}

#[test]
fn report_fits_every_series() {
    let dir = TempDir::new().unwrap();
    let cfg = sweep_config(&dir);
    let table = dir.path().join("rows.json");
    assert_eq!(code(&qtradeoff(&["sweep", "--config", &cfg, "--out", table.to_str().unwrap()])), 0);
    let out = qtradeoff(&["report", "--in", table.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rows"], 27);
    let fits = v["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 3);
    for f in fits {
        assert_eq!(f["points"], 3);
        assert!(f["exponent"].as_f64().unwrap() > 0.5);
    }
    // Three N values per series, but only one t: nothing to fit along t.
    let out = qtradeoff(&["report", "--in", table.to_str().unwrap(), "--axis", "t"]);
    assert_eq!(json(&out)["fits"].as_array().unwrap().len(), 0);
}

#[test]
fn report_flags_a_wrong_exact_row() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("N,t,S,mode,seed,T,queries_x,queries_b,space,correct\n");
    for (n, t) in [(16, 64), (32, 181), (64, 512)] {
        text.push_str(&format!("{n},2,12,exact,0,{t},{t},0,10,{}\n", n != 32));
    }
    let p = write(&dir, "rows.csv", &text);
    let out = qtradeoff(&["report", "--in", &p]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["incorrect"], 1);
    assert!((v["fits"][0]["exponent"].as_f64().unwrap() - 1.5).abs() < 0.01);
}

#[test]
fn subspace_verify_reports_json_checks() {
    let out = qtradeoff(&["subspace", "verify", "--n", "4", "--t", "2", "--k", "2", "--runs", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["terminal_index"], 1);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 6);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn poly_verify_writes_a_stable_table() {
    let dir = TempDir::new().unwrap();
    let csv = |name: &str| {
        let p = dir.path().join(name);
        let out = qtradeoff(&["poly", "verify", "--suite", "blocks", "--seed", "9", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        assert_eq!(v[0]["suite"], "blocks");
        fs::read(&p).unwrap()
    };
    assert_eq!(csv("a.csv"), csv("b.csv"));
    assert_eq!(code(&qtradeoff(&["poly", "verify", "--suite", "all", "--out", "x.csv"])), 2);
    assert!(!Path::new("x.csv").exists());
}
