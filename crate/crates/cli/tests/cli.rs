use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cocycle-optim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn emit(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    let out = run(&["corpus", "emit", name, "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn certify_noc_remark() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "noc-remark");
    let out = run(&["certify", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["certificate"]["noc_forward"], true);
    assert_eq!(r["results"]["certificate"]["noc_backward"], false);
    assert!(r.get("wall_time_s").is_none());
    let timed = json(&run(&["certify", &f, "--timing"]));
    assert!(timed["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": \"x\", \"matrices\": [[[1, 2]]]}").unwrap();
    assert_eq!(run(&["certify", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["certify", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["corpus", "emit", "no-such-example"]).status.code(), Some(2));
    let rot = emit(dir.path(), "rotations");
    assert_eq!(run(&["mather", &rot]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "positive-pair");
    let args = ["mather", &f, "--mode", "bottom", "--ell-max", "8", "--grid", "1024"];
    let a = bin().args(args).arg("--threads").arg("1").output().unwrap();
    let b = bin().args(args).env("COCYCLE_OPTIM_THREADS", "3").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "diagonal-pair");
    let csv = dir.path().join("brackets.csv");
    let out = run(&["exponents", &f, "--depth", "4", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("depth,quantity,lower,upper"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[1], "lambda1_top");
    // 17 significant digits round-trip exactly.
    assert_eq!(first[2].parse::<f64>().unwrap(), 3f64.ln());
    let r = json(&out);
    assert!((r["results"]["barabanov"]["beta"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-6);

    let table = dir.path().join("table.csv");
    assert!(run(&["barabanov", &f, "--mode", "bottom", "--csv", table.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("mode,beta,residual\nbottom,"));
    assert_eq!(text.lines().count(), 3 + 4096);
}

#[test]
fn corpus_list_names_every_example() {
    let r = json(&run(&["corpus", "list"]));
    let names: Vec<&str> = r["results"]["examples"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"heteroclinic") && names.contains(&"nonunique-top"));
}

#[test]
fn posent_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "rotation-contraction");
    let r = json(&run(&["posent", &f, "--trials", "5", "--blocks", "10"]));
    assert_eq!(r["results"]["trials"]["all_within_bounds"], true);
    let g = emit(dir.path(), "nonunique-bottom");
    let r = json(&run(&["audit", &g, "--mode", "bottom"]));
    assert_eq!(r["results"]["audit"]["periodic_roots"], serde_json::json!(["1", "2"]));
    assert!(r["results"]["audit"]["cross_ratio"]["violations"].as_array().unwrap().is_empty());
}
