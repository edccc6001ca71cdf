use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsa")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn corpus(f: &str) -> String {
    format!("{}/../../corpus/{f}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn solve_reports_one_generator_for_virasoro() {
    let v = json(&["solve", "builtin:virasoro", "--parity", "even", "--dp", "2", "--dl", "2", "--json"]);
    let s = &v["spaces"][0];
    assert_eq!(s["dim_Q"], 2, "{v}");
    assert_eq!(s["rank_at_bound"], 1, "{v}");
    assert_eq!(s["residual_check"], "pass", "{v}");
}

#[test]
fn verify_passes_the_intersection_identity() {
    let out = run(&["verify", "builtin:cur_sl2", "--prop", "P4.7", "--abg", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn hilbert_on_a_file_map() {
    let f = corpus("cur_sl2.lcsa");
    let v = json(&["hilbert", &f, "--sigma", "cartan", "--interior", "minus", "--dp", "1", "--dl", "1", "--l0", "2", "--json"]);
    assert_eq!(v["order"], 2, "{v}");
    assert_eq!(v["periodicity"], 2, "{v}");
    assert_eq!(v["rationality"]["verdict"], "rational", "{v}");
}

#[test]
fn non_automorphism_twist_is_a_usage_error() {
    let out = run(&["hilbert", "builtin:cur_sl2", "--sigma", "neg_id"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_and_files() {
    assert_eq!(run(&["solve", "builtin:virasoro", "--kind", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["check", "/nonexistent/file.lcsa"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "builtin:virasoro", "--prop", "P9.9"]).status.code(), Some(2));
}

#[test]
fn diagnostics_point_at_the_offending_token() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("rev.lcsa");
    std::fs::write(&f, "algebra A {\n    basis a: even, b: even;\n    [b,a] = a;\n}\n").unwrap();
    let out = run(&["check", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error at 3:5"), "{err}");
    assert!(err.contains("i <= j"), "{err}");
}

#[test]
fn report_runs_every_task() {
    let v = json(&["report", &corpus("tasks.lcsa"), "--json"]);
    let tasks = v.as_array().unwrap();
    assert_eq!(tasks.len(), 7);
    assert!(tasks.iter().all(|t| t["pass"] == true), "{v}");
}
