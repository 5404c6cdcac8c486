use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ferriq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ferriq")).args(args).env_remove("FERRIQ_ORACLE_CAP").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write_artifact(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut all = args.to_vec();
    all.extend(["-o", path.as_str()]);
    let o = ferriq(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn swap_of_two_modes_needs_a_cz() {
    let o = ferriq(&["compile-perm", "--perm", "1,0", "--verify"]);
    assert_eq!(code(&o), 0);
    let doc = json_stdout(&o);
    assert!(doc["cost"]["cz_count"].as_u64().unwrap() >= 1);
    assert_eq!(doc["verification"]["pass"], Value::Bool(true));
    assert_eq!(doc["meta"]["tool"], "ferriq");
    assert_eq!(doc["meta"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn non_bijection_is_a_validation_error() {
    assert_eq!(code(&ferriq(&["compile-perm", "--perm", "0,1,3"])), 2);
    assert_eq!(code(&ferriq(&["compile-mperm", "--perm", "0,1,2"])), 2);
}

#[test]
fn ffft_sectors_verify() {
    for sector in ["0", "1", "2"] {
        let o = ferriq(&["compile-ffft", "--n", "3", "--verify-sector", sector]);
        assert_eq!(code(&o), 0, "sector {sector}");
        assert_eq!(json_stdout(&o)["verification"]["pass"], Value::Bool(true));
    }
    let o = ferriq(&["compile-ffft", "--n", "1", "--dim", "2", "--verify-sector", "1"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn table_s1_rows() {
    let out = stdout(&ferriq(&["tables", "--which", "s1-ccz"]));
    assert!(out.lines().any(|l| l == "64,26,0.406"), "{out}");
    assert!(out.lines().any(|l| l == "256,120,0.469"));
}

#[test]
fn table_s2_rows() {
    let out = stdout(&ferriq(&["tables", "--which", "s2-interleave"]));
    assert!(out.lines().any(|l| l == "128,2016,250"), "{out}");
    assert!(out.lines().any(|l| l == "2,0,0"));
}

#[test]
fn asymptotics_table_shows_bounded_reflection_cost() {
    let out = stdout(&ferriq(&["tables", "--which", "table1-asymptotics", "--n-max", "5"]));
    let reflect: Vec<f64> = out
        .lines()
        .filter(|l| l.contains(",dynamic_jw,"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(reflect.len(), 5);
    assert!(reflect.iter().all(|&r| r <= 5.0), "{reflect:?}");
}

#[test]
fn verify_accepts_good_and_rejects_mutated_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_artifact(dir.path(), "good.json", &["compile-perm", "--perm", "2,0,3,1"]);
    assert_eq!(code(&ferriq(&["verify", &good, "--m1", "2,0,3,1"])), 0);

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let ins = doc["circuit"]["instructions"].as_array_mut().unwrap();
    let cz = ins.iter().position(|i| i["op"] == "cz").expect("fixture has a CZ");
    ins.remove(cz);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    // Block annotations now point past the shortened list.
    assert_ne!(code(&ferriq(&["verify", bad.to_str().unwrap(), "--m1", "2,0,3,1"])), 0);

    doc["circuit"].as_object_mut().unwrap().remove("blocks");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = ferriq(&["verify", bad.to_str().unwrap(), "--m1", "2,0,3,1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json_stdout(&o)["verification"]["pass"], Value::Bool(false));
}

#[test]
fn verify_accepts_fswap_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_artifact(dir.path(), "fswap.json", &["compile-perm", "--perm", "3,1,0,2", "--strategy", "fswap"]);
    assert_eq!(code(&ferriq(&["verify", &path, "--m1", "3,1,0,2"])), 0);
}

#[test]
fn verify_majorana_images() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_artifact(dir.path(), "m.json", &["compile-mperm", "--perm", "1,2,3,0"]);
    assert_eq!(code(&ferriq(&["verify", &path, "--majorana", "1,2,3,0"])), 0);
    assert_eq!(code(&ferriq(&["verify", &path, "--majorana", "0,1,2,3"])), 3);
}

#[test]
fn verify_reports_missing_file_and_bad_json() {
    assert_eq!(code(&ferriq(&["verify", "/nonexistent/circuit.json", "--m1", "0"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(code(&ferriq(&["verify", p.to_str().unwrap(), "--m1", "0"])), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["syk", "compile", "--model", "interleave", "--n", "16", "--rounds", "2", "--seed", "4"];
    let a = write_artifact(dir.path(), "a.json", &args);
    let b = write_artifact(dir.path(), "b.json", &args);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "temporary files left behind: {names:?}");
}

#[test]
fn seed_changes_config_hash() {
    let a = json_stdout(&ferriq(&["syk", "sample", "--n", "12", "--d", "2", "--seed", "1"]));
    let b = json_stdout(&ferriq(&["syk", "sample", "--n", "12", "--d", "2", "--seed", "2"]));
    assert_eq!(a["meta"]["seed"], 1);
    assert_ne!(a["meta"]["config_hash"], b["meta"]["config_hash"]);
    assert_ne!(a["instance"], b["instance"]);
}

#[test]
fn syk_cycle_verifies_against_dense_reference() {
    let o = ferriq(&["syk", "compile", "--model", "interleave", "--n", "8", "--rounds", "2", "--cascade", "serial", "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json_stdout(&o);
    assert_eq!(doc["verification"]["pass"], Value::Bool(true));
    assert_eq!(doc["syk_cost"]["terms"], 4);
}

#[test]
fn oracle_cap_is_enforced() {
    assert_eq!(code(&ferriq(&["syk", "compile", "--n", "40", "--verify"])), 2);
    let args = ["--oracle-cap", "4", "syk", "compile", "--model", "interleave", "--n", "8", "--cascade", "serial", "--verify"];
    assert_eq!(code(&ferriq(&args)), 2);
    assert_eq!(code(&ferriq(&["--oracle-cap", "0", "tables", "--which", "s1-ccz"])), 2);
}

#[test]
fn sff_csv_columns() {
    let o = ferriq(&["syk", "sff", "--n", "10", "--d", "3", "--instances", "4", "--points", "6", "--tmax", "100", "--jobs", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,mean,stderr");
    assert_eq!(rows.len(), 7);
    let first: Vec<f64> = rows[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert!(first[1] > 0.9 && first[1] <= 1.0);
}

#[test]
fn momentum_pairing_verifies() {
    for kind in ["kx-negate", "full-k-negate", "spin-split"] {
        let o = ferriq(&["compile-pairing", "--l", "4", "--kind", kind, "--verify"]);
        assert_eq!(code(&o), 0, "{kind}");
    }
}

#[test]
fn csv_cost_report() {
    let out = stdout(&ferriq(&["compile-perm", "--perm", "1,0", "--format", "csv"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# ferriq"));
    assert!(lines[1].split(',').any(|k| k == "cz_count"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn erdos_renyi_flag_samples_without_layers() {
    let doc = json_stdout(&ferriq(&["syk", "sample", "--n", "40", "--d", "3", "--erdos-renyi"]));
    assert_eq!(doc["instance"]["layers"].as_array().unwrap().len(), 0);
    assert!(!doc["instance"]["terms"].as_array().unwrap().is_empty());
}
