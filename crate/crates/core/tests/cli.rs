//! Exit codes, artifacts and reproducibility of the `normform` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn normform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normform")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn code(args: &[&str]) -> i32 {
    normform(args).status.code().expect("exit code")
}

#[test]
fn exit_code_success() {
    let v = json(&normform(&["field", "--minpoly", "x^2-2"]));
    assert_eq!(v["tool"], "normform");
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["result"]["signature"], serde_json::json!([2, 0]));
}

#[test]
fn exit_code_precondition() {
    assert_eq!(code(&["field", "--minpoly", "x^2-1"]), 2);
    assert_eq!(code(&["classify", "--units", "/nonexistent.json", "--signature", "x"]), 2);
    assert_eq!(code(&["counterexample", "cor2", "--minpoly", "x^2-2", "--box", "3"]), 2);
    assert_eq!(code(&["spectrum", "--minpoly", "x^2-2", "--linear", "1,0;0,1"]), 2);
}

#[test]
fn exit_code_budget() {
    assert_eq!(code(&["spectrum", "--minpoly", "x^2-2", "--box", "1000", "--budget", "1000"]), 3);
}

#[test]
fn exit_code_precision_floor() {
    assert_eq!(code(&["orbit", "probe", "--minpoly", "x^2-2", "--log-box", "0:400", "--grid", "4"]), 4);
}

#[test]
fn spectrum_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["spectrum", "--linear", "1,0;0,1", "--box", "3", "--window", "4", "--out", p]), 0);
    let mut rd = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["value", "approx", "multiplicity", "witness"]);
    let values: Vec<String> = rd.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert!(values.contains(&"0".to_string()));
    assert!(values.contains(&"-4".to_string()));
}

#[test]
fn orbit_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["orbit", "probe", "--linear", "1,0;0,1", "--log-box", "0:2.0", "--grid", "5", "--out", p]), 0);
    let mut rd = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["u1", "systole", "witness"]);
    let systoles: Vec<f64> = rd.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(systoles.len(), 5);
    assert!((systoles[4] - (-2.0f64).exp()).abs() < 1e-12);
}

#[test]
fn classify_block_diagonal_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.json");
    std::fs::write(&path, r#"{"minpoly": "x^2-2", "units": [["3", "2"]], "copies": 2}"#).unwrap();
    let v = json(&normform(&["classify", "--units", path.to_str().unwrap(), "--signature", "0,2", "--n", "4"]));
    assert_eq!(v["result"]["verdict"]["branch"], "quasi_algebraic");
    assert_eq!(v["result"]["verdict"]["l"], 2);
}

#[test]
fn witness_scan_and_control() {
    let v = json(&normform(&["counterexample", "witness", "--depth", "64"]));
    assert_eq!(v["result"]["verdict"]["verdict"], "no_witness");
    let v = json(&normform(&["counterexample", "witness", "--depth", "64", "--control"]));
    assert_eq!(v["result"]["verdict"]["verdict"], "witness_found");
    assert_eq!(v["result"]["verdict"]["period"], 1);
}

#[test]
fn form_reduce_from_linear_rows() {
    let v = json(&normform(&["form", "reduce", "--linear", "1,1,0;0,1,1"]));
    assert_eq!(v["result"]["outcome"], "reduced");
    assert_eq!(v["result"]["kernel"], serde_json::json!([["1/1", "-1/1", "1/1"]]));
}

#[test]
fn pipeline_split_form() {
    let v = json(&normform(&["pipeline", "--linear", "1,0;0,1"]));
    let r = &v["result"];
    assert_eq!(r["verdict"], "not norm-like: represents zero");
    assert_eq!(r["zeros"]["witness"], serde_json::json!([1, 0]));
    assert_eq!(r["classification"]["status"], "skipped");
    assert_eq!(r["coherent"], true);
}

fn run_to(path: &Path, args: &[&str], threads: &str) -> Vec<u8> {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    let st = Command::new(env!("CARGO_BIN_EXE_normform"))
        .args(&full)
        .env("NORMFORM_THREADS", threads)
        .status()
        .unwrap();
    assert!(st.success());
    std::fs::read(path).unwrap()
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    for args in [&["pipeline", "--minpoly", "x^3-2", "--seed", "11"][..], &["pipeline", "--cor3", "32"][..]] {
        let a = run_to(&path, args, "1");
        let b = run_to(&path, args, "4");
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn quasi_form_of_a_cm_field() {
    let v = json(&normform(&["form", "quasi", "--cm-minpoly", "x^4+1"]));
    assert_eq!(v["result"]["form"]["signature"], serde_json::json!([0, 2]));
    assert_eq!(v["result"]["form"]["m"], 4);
    assert_eq!(code(&["form", "quasi", "--cm-minpoly", "x^3-2"]), 2);
}
