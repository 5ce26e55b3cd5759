use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn boxcost(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxcost")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_then_analyze_pr_box() {
    let dir = tempfile::tempdir().unwrap();
    assert!(boxcost(&["gen", "--kind", "pr", "--out", "pr.json"], dir.path()).status.success());
    let out = boxcost(&["analyze", "pr.json", "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["cost_full"]["C"], "1/1");
    assert_eq!(v["cost_full"]["s"], "0/1");
    assert_eq!(v["chsh"]["lambda_max"], "4/1");
    assert_eq!(v["flags"]["strongly_nonclassical"], true);
    assert_eq!(v["flags"]["lhv"], false);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--kind", "random", "--sub", "general", "--seed", "5", "--count", "3"];
    let a = boxcost(&args, dir.path());
    let b = boxcost(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let fuzz = ["fuzz", "--family", "oneway_slice", "--seed", "3", "--count", "40"];
    let a = boxcost(&fuzz, dir.path());
    let b = boxcost(&fuzz, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["asserted_violations"], 0);
}

#[test]
fn corrupted_sampler_exits_one_and_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxcost(
        &["fuzz", "--family", "general", "--seed", "7", "--count", "20", "--out", "f.json", "--corrupt-sampler"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(report["aborted"], true);
    let sample = report["samples"].as_u64().unwrap() - 1;
    let witness = dir.path().join(format!("f-witness-{sample}.json"));
    let check = boxcost(&["analyze", witness.to_str().unwrap(), "--json"], dir.path());
    assert!(check.status.success());
    assert_eq!(stdout_json(&check)["signal"]["s"], "1/1");
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"format":"box-v1","p":[[1,0,0,0]]}"#).unwrap();
    assert_eq!(boxcost(&["analyze", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(boxcost(&["analyze", "missing.json"], dir.path()).status.code(), Some(2));
    assert_eq!(boxcost(&["gen", "--kind", "nonsense"], dir.path()).status.code(), Some(2));
    assert_eq!(boxcost(&["fuzz", "--family", "bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn decompose_noise_finds_disjoint_alternative() {
    let dir = tempfile::tempdir().unwrap();
    assert!(boxcost(&["gen", "--kind", "noise", "--out", "n.json"], dir.path()).status.success());
    let v = stdout_json(&boxcost(&["decompose", "n.json", "--alt"], dir.path()));
    assert_eq!(v["status"], "optimal");
    let ids = |d: &Value| -> Vec<String> { d["weights"].as_object().unwrap().keys().cloned().collect() };
    let (first, second) = (ids(&v["decomposition"]), ids(&v["alternative"]));
    assert_eq!(first.len(), 4);
    assert!(first.iter().all(|k| !second.contains(k)));
}

#[test]
fn decompose_outside_chsh16_hull() {
    let dir = tempfile::tempdir().unwrap();
    assert!(boxcost(&["gen", "--kind", "quantum", "--out", "t.json"], dir.path()).status.success());
    let out = boxcost(&["decompose", "t.json", "--basis", "chsh16"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"], "not-in-hull");
}

#[test]
fn repro_passes_and_reports_discrepancies() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxcost(&["repro", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["discrepancies"].as_array().unwrap().len(), 2);
}

#[test]
fn isotropic_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxcost(&["sweep", "--kind", "isotropic", "--steps", "4", "--csv", "s.csv"], dir.path());
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let col = |name: &str| rows[0].iter().position(|c| *c == name).unwrap();
    let c_exact: Vec<&str> = rows[1..].iter().map(|r| r[col("C_exact")]).collect();
    assert_eq!(c_exact, ["0/1", "0/1", "0/1", "1/2", "1/1"]);
}
