use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn birefl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_birefl"))
        .args(args)
        .env_remove("BIREFL_MAX_RETRIES")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn diag_2_half() -> Value {
    json!({"n": 2, "entries": [2, 0, 0, 0.5]})
}

fn j3() -> Value {
    json!({"n": 3, "entries": [0, 1, 0, 0, 0, 1, 0, 0, 0]})
}

fn tri3() -> Value {
    json!({"generators": [
        {"n": 3, "entries": [0, 1, 0, 0, 0, 0, 0, 0, 0]},
        {"n": 3, "entries": [0, 0, 0, 0, 0, 1, 0, 0, 0]}
    ]})
}

#[test]
fn birefl_certificate_round_trips() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "x.json", &diag_2_half());
    let cert = dir.path().join("cert.json");
    let out = birefl(&["birefl", "--input", s(&input), "--seed", "3", "--out", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["kind"], "bireflectional");
    assert_eq!(c["pass"], true);
    assert!(c["residuals"]["ab = x"].as_f64().unwrap() <= 1e-10);

    let v = birefl(&["verify", "--cert", s(&cert)]);
    assert_eq!(v.status.code(), Some(0));
    let report = stdout_json(&v);
    assert_eq!(report["pass"], true);
    assert_eq!(report["failed"], json!([]));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "x.json", &json!({"n": 3, "entries": [0, 0, 1, 1, 0, 0, 0, 1, 0]}));
    let run = |seed: &str| birefl(&["szero", "--input", s(&input), "--seed", seed]).stdout;
    let first = run("17");
    assert!(!first.is_empty());
    assert_eq!(first, run("17"));
}

#[test]
fn subalgebra_counterexample_is_refused() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "j3.json", &j3());
    let algebra = write(&dir, "tri3.json", &tri3());
    let out = birefl(&["szero", "--input", s(&input), "--algebra", s(&algebra)]);
    assert_eq!(out.status.code(), Some(2));
    let refusal = stdout_json(&out);
    assert_eq!(refusal["error"], "NotConjugateInAlgebra");
    assert_eq!(refusal["details"]["target"], "negation");

    let full = birefl(&["szero", "--input", s(&input)]);
    assert_eq!(full.status.code(), Some(0));
}

#[test]
fn tampered_certificate_names_the_broken_identity() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "x.json", &diag_2_half());
    let out = birefl(&["birefl", "--input", s(&input)]);
    let mut cert = stdout_json(&out);
    let a00 = &mut cert["factors"][0]["entries"][0][0];
    *a00 = json!(a00.as_f64().unwrap() + 1e-3);
    let tampered = write(&dir, "tampered.json", &cert);
    let v = birefl(&["verify", "--cert", s(&tampered)]);
    assert_eq!(v.status.code(), Some(2));
    let failed = stdout_json(&v)["failed"].clone();
    assert!(failed.as_array().unwrap().contains(&json!("ab = x")), "{failed}");
}

#[test]
fn unitary4_with_a_symplectic_form() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "x.json", &diag_2_half());
    let form = write(&dir, "g.json", &json!({"n": 2, "entries": [0, 1, -1, 0]}));
    let star = format!("form:{}", s(&form));
    let out = birefl(&["unitary4", "--input", s(&input), "--star", &star]);
    assert_eq!(out.status.code(), Some(0));
    let cert = stdout_json(&out);
    assert_eq!(cert["kind"], "unitary4");
    assert_eq!(cert["path"], "skew");
    let path = write(&dir, "cert.json", &cert);
    assert_eq!(birefl(&["verify", "--cert", s(&path)]).status.code(), Some(0));
}

#[test]
fn unitary4_refuses_a_non_unitary_input() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "x.json", &diag_2_half());
    let out = birefl(&["unitary4", "--input", s(&input), "--star", "transpose"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["details"]["violated"], json!(["x unitary"]));
}

#[test]
fn sqrt_of_a_jordan_block() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "x.json", &json!({"n": 2, "entries": [4, 1, 0, 4]}));
    let out = birefl(&["sqrt", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let w = &stdout_json(&out)["factors"][0]["entries"];
    // sqrt(4 + N) = 2 + N/4
    let expect = [[2.0, 0.0], [0.25, 0.0], [0.0, 0.0], [2.0, 0.0]];
    for (k, e) in expect.iter().enumerate() {
        assert!((w[k][0].as_f64().unwrap() - e[0]).abs() < 1e-12);
        assert!((w[k][1].as_f64().unwrap() - e[1]).abs() < 1e-12);
    }
}

#[test]
fn io_and_usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let out = birefl(&["birefl", "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(birefl(&["birefl", "--input", s(&garbage)]).status.code(), Some(1));
    assert_eq!(birefl(&["verify"]).status.code(), Some(1));

    let input = write(&dir, "x.json", &diag_2_half());
    let bad_retries = Command::new(env!("CARGO_BIN_EXE_birefl"))
        .args(["birefl", "--input", s(&input)])
        .env("BIREFL_MAX_RETRIES", "many")
        .output()
        .unwrap();
    assert_eq!(bad_retries.status.code(), Some(1));
}

#[test]
fn retry_budget_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "j3.json", &j3());
    let algebra = write(&dir, "tri3.json", &tri3());
    let out = Command::new(env!("CARGO_BIN_EXE_birefl"))
        .args(["szero", "--input", s(&input), "--algebra", s(&algebra)])
        .env("BIREFL_MAX_RETRIES", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["details"]["attempts"], 5);
}
