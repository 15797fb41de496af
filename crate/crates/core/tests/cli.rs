mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::crate_root;
use serde_json::Value;

fn fx(name: &str) -> PathBuf {
    crate_root().join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vvforms")).args(args).env_remove("VVFORMS_THREADS").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(name: &str) -> String {
    fx(name).to_string_lossy().into_owned()
}

#[test]
fn lattice_info_for_example() {
    let v = json(&run(&["lattice-info", "--gram", &p("example5.json")]));
    assert_eq!(v["signature"], serde_json::json!([2, 3]));
    assert_eq!(v["size"], 32);
    assert_eq!(v["level"], 4);
    assert_eq!(v["gauss_sum_complex"], "4 - 4i");
    assert_eq!(v["milgram"], true);
}

#[test]
fn weil_matrix_output_shape() {
    let v = json(&run(&["weil-matrix", "--gram", &p("hyperbolic.json"), "--word", "S^2"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("selftest passed"));
}

#[test]
fn obstruction_and_constant_term() {
    let v = json(&run(&[
        "obstruct",
        "--gram",
        &p("hyperbolic.json"),
        "--ppart",
        &p("l22_ppart_admissible.json"),
        "--cusps",
        &p("l22_cusps.json"),
        "--E",
        &p("l22_eisenstein.json"),
    ]));
    assert_eq!(v["admissible"], true);
    assert_eq!(v["constant_term"], "-196560");
    let v = json(&run(&[
        "obstruct",
        "--gram",
        &p("hyperbolic.json"),
        "--ppart",
        &p("l22_ppart_obstructed.json"),
        "--cusps",
        &p("l22_cusps.json"),
    ]));
    assert_eq!(v["admissible"], false);
    assert_eq!(v["witness"], 0);
}

#[test]
fn congruence_691() {
    let v = json(&run(&[
        "congruence",
        "--gram",
        &p("hyperbolic.json"),
        "--E",
        &p("l22_eisenstein.json"),
        "--d",
        "691",
        "--cusps",
        &p("l22_cusps.json"),
        "--N",
        "10",
    ]));
    assert_eq!(v["combo"], serde_json::json!(["566"]));
    assert_eq!(v["d"], "691");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eisenstein", "--gram", &p("example5.json")]).status.code(), Some(2));
    assert_eq!(run(&["eisenstein", "--gram", &p("example5.json"), "--N", "2", "--C", "0"]).status.code(), Some(2));
    assert_eq!(run(&["selftest", "--tolerance", "0.5"]).status.code(), Some(2));
    let missing = run(&["lattice-info", "--gram", "/nonexistent/gram.json"]);
    assert_eq!(missing.status.code(), Some(1));
    // Cusp basis for the trivial form against the example lattice.
    let mismatch = run(&[
        "congruence",
        "--gram",
        &p("example5.json"),
        "--E",
        &p("l22_eisenstein.json"),
        "--d",
        "691",
        "--cusps",
        &p("l22_cusps.json"),
        "--N",
        "3",
    ]);
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("mismatch"));
}

#[test]
fn output_independent_of_thread_count() {
    let args = ["eisenstein", "--gram", &p("hyperbolic.json"), "--weight", "12", "--N", "3", "--C", "64", "--max-den", "10000"];
    let one = run(&[&["--threads", "1"], &args[..]].concat());
    let four = run(&[&["--threads", "4"], &args[..]].concat());
    let v = json(&one);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(v["d"], "691");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("info.json");
    let out = run(&["lattice-info", "--gram", &p("hyperbolic.json"), "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["size"], 1);
}
