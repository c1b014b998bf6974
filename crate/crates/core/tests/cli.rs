//! The binary end to end: exit codes, formats and diagnostics.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn write(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("koszul-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul-lab"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .env_remove("RUST_LIB_BACKTRACE")
        .output()
        .unwrap()
}

fn run_on(file: &PathBuf, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--input", file.to_str().unwrap()]);
    lab(&all)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const POINT: &str = r#"{"field":{"type":"Q"},"complex":{"ranks":{"0":1},"diffs":{}},"window":{"j_min":0,"j_max":6}}"#;

#[test]
fn cohomology_of_t() {
    let p = write("point.json", POINT);
    let out = run_on(&p, &["cohomology", "--module", "T", "--format", "json"]);
    assert!(out.status.success());
    let want: Vec<Value> = (0..=3).map(|m| serde_json::json!({"i": 0, "j": 2 * m, "dim": 1})).collect();
    assert_eq!(stdout_json(&out)["table"], Value::Array(want));

    let out = run_on(&p, &["cohomology", "--module", "T", "--window", "-4:2", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "i,j,dim\n0,0,1\n0,2,1\n");
}

#[test]
fn verify_on_an_input_complex() {
    let p = write(
        "x.json",
        r#"{"field":{"type":"Fp","p":7},"complex":{"ranks":{"-2":1,"-1":2,"0":1},"diffs":{"-2":[[1],[3]],"-1":[[3,6]]}},"window":{"j_min":-8,"j_max":0}}"#,
    );
    let out = run_on(&p, &["verify", "--suite", "koszul-acyclicity", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = stdout_json(&out);
    assert_eq!(body[0]["pass"], true);
    assert_eq!(body[0]["witnesses"][0]["K1"], serde_json::json!([{"i": 0, "j": 0, "dim": 1}]));
}

#[test]
fn intersect_and_check() {
    let p = write("setup.json", r#"{"field":{"type":"Q"},"setup":{"dim_E":1,"F1":[],"F2":[]},"window":{"j_min":0,"j_max":6}}"#);
    let out = run_on(&p, &["intersect"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS κ(k) = R-side"), "{text}");
    assert!(run_on(&p, &["check"]).status.success());
}

#[test]
fn bad_inputs_fail_with_reasons() {
    let p = write("nonprime.json", &POINT.replace(r#"{"type":"Q"}"#, r#"{"type":"Fp","p":15}"#));
    let out = run_on(&p, &["check"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("p not prime"));

    let p = write(
        "dsquare.json",
        r#"{"field":{"type":"Q"},"complex":{"ranks":{"0":1}},"window":{"j_min":0,"j_max":2},
            "modules":{"M":{"dims":{"(0,0)":1,"(1,0)":1,"(2,0)":1},"diff":{"(0,0)":[[1]],"(1,0)":[[1]]}}}}"#,
    );
    let out = run_on(&p, &["check"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("modules.M") && err.contains("(0,0)"), "{err}");

    let p = write("point2.json", POINT);
    let out = run_on(&p, &["cohomology", "--module", "Q"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown module 'Q'"));

    assert!(!lab(&["cohomology", "--module", "T"]).status.success());
    assert!(!lab(&["verify", "--suite", "nope"]).status.success());
    assert!(!lab(&["frobnicate"]).status.success());
}

#[test]
fn builtin_suite_reports() {
    let out = lab(&["verify", "--suite", "char-p", "--format", "json"]);
    assert!(out.status.success());
    let body = stdout_json(&out);
    assert_eq!(body[0]["check"], "char-p");
    assert_eq!(body[0]["window"], serde_json::json!({"j_min": 0, "j_max": 8}));
}
