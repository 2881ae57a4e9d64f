use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn prlb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prlb"))
        .args(args)
        .env_remove("PRLB_ZERO_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn zeros() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/zeros")
        .to_string_lossy()
        .into_owned()
}

#[test]
fn race_finds_first_crossing() {
    let v = json(&prlb(&["race", "--k", "4", "--pair", "3,1", "--T", "30000"]));
    assert_eq!(v["first_negative"], 26861);
    assert_eq!(v["w"], 2);
}

#[test]
fn semiprime_counts() {
    let v = json(&prlb(&["race", "--k", "4", "--f", "pi2", "--pair", "1,3", "--T", "25"]));
    assert_eq!(v["counts"]["1"], 3);
    assert_eq!(v["counts"]["3"], 1);
}

#[test]
fn race_without_classes_is_a_usage_error() {
    let out = prlb(&["race", "--k", "4", "--T", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_sums() {
    let out = prlb(&["kernel", "--kind", "abel", "--k", "4", "--pair", "3,1", "--r", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = row[1].parse().unwrap();
    // primes 3, 5, 7 with signs +, -, +; 11 and beyond are below 1e-18 relative
    let want = (-15.0f64).exp() - (-25.0f64).exp() + (-35.0f64).exp();
    assert!((v / want - 1.0).abs() < 1e-12, "{v}");

    let out = prlb(&[
        "kernel", "--kind", "bentz", "--k", "4", "--alpha", "0.5", "--x", "50:120:10", "--prime-cap", "10000000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let v: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v < 0.0, "{r}");
    }
}

#[test]
fn density_within_band() {
    let z = zeros();
    let v = json(&prlb(&["density", "--k", "8", "--tuple", "3,5,7", "--zeros", &z]));
    let d = v["delta"].as_f64().unwrap();
    assert!((d - 0.192_801_3).abs() < 5e-3, "{d}");

    let v = json(&prlb(&["density", "--k", "8", "--tuple", "3,5", "--zeros", &z, "--max-zeros", "50"]));
    assert_eq!(v["unbiased"], true);
    assert!((v["delta"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn density_errors_have_distinct_codes() {
    let z = zeros();
    let out = prlb(&["density", "--k", "8", "--tuple", "3,3,5", "--zeros", &z]);
    assert_eq!(out.status.code(), Some(2));
    let out = prlb(&["density", "--k", "7", "--tuple", "3,1", "--zeros", &z]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("7"));
}

#[test]
fn output_is_deterministic() {
    let z = zeros();
    let args = ["density", "--k", "12", "--tuple", "5,7,11", "--zeros", &z, "--max-zeros", "40"];
    let a = prlb(&args);
    let b = prlb(&args);
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let c = prlb(&one);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);

    let race = ["race", "--k", "4", "--pair", "3,1", "--T", "2000000"];
    let a = prlb(&race);
    let mut one = race.to_vec();
    one.extend(["--threads", "1"]);
    assert_eq!(a.stdout, prlb(&one).stdout);
}

#[test]
fn checkpoint_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let half = dir.path().join("half.ckpt");
    let whole = dir.path().join("whole.ckpt");
    let resumed = dir.path().join("resumed.ckpt");
    let (h, w, r) = (
        half.to_str().unwrap(),
        whole.to_str().unwrap(),
        resumed.to_str().unwrap(),
    );
    let direct = prlb(&["race", "--k", "4", "--pair", "3,1", "--T", "3000000", "--checkpoint", w]);
    assert!(direct.status.success());
    assert!(prlb(&["race", "--k", "4", "--pair", "3,1", "--T", "1200000", "--checkpoint", h])
        .status
        .success());
    let cont = prlb(&[
        "race", "--k", "4", "--pair", "3,1", "--T", "3000000", "--resume", h, "--checkpoint", r,
    ]);
    assert!(cont.status.success(), "{}", String::from_utf8_lossy(&cont.stderr));
    assert_eq!(direct.stdout, cont.stdout);
    assert_eq!(std::fs::read(&whole).unwrap(), std::fs::read(&resumed).unwrap());
}
