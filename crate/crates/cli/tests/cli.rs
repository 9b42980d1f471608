use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holo-lwe-lab"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn entropy_record_reports_one_bit_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[entropy]\ngrid = [{ q = 3, n = 2, k = 1 }]\n").unwrap();
    let status = lab()
        .args(["entropy", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .args(["--format", "json"])
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_json(&dir.path().join("out/entropy.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["anchor"], "entropy-difference");
    assert!((rows[0]["entropy_gap"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(!dir.path().join("out/entropy.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let status = lab()
            .args(["etcf", "--seed", "11", "--format", "csv", "--out"])
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["etcf.csv", "manifest.json"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
    let status =
        lab().args(["etcf", "--seed", "12", "--format", "csv", "--out"]).arg(dir.path().join("c")).status().unwrap();
    assert!(status.success());
    assert_ne!(
        std::fs::read(dir.path().join("a/etcf.csv")).unwrap(),
        std::fs::read(dir.path().join("c/etcf.csv")).unwrap()
    );
}

#[test]
fn costs_have_one_row_per_size_and_model() {
    let dir = tempfile::tempdir().unwrap();
    let status = lab().args(["costs", "--out"]).arg(dir.path()).status().unwrap();
    assert!(status.success());
    let rows = read_json(&dir.path().join("costs.json"));
    let rows = rows.as_array().unwrap();
    let mut keys: Vec<(u64, String)> =
        rows.iter().map(|r| (r["N"].as_u64().unwrap(), r["label"].as_str().unwrap().to_string())).collect();
    let n = keys.len();
    let sorted = {
        let mut k = keys.clone();
        k.sort();
        k
    };
    assert_eq!(keys, sorted);
    keys.dedup();
    assert_eq!(keys.len(), n);
    assert_eq!(n, 8 * 8);
    assert!(rows.iter().all(|r| r["anchor"].is_string() && r["model_params"].is_null()));
    let csv = std::fs::read_to_string(dir.path().join("costs.csv")).unwrap();
    assert_eq!(csv.lines().count(), n + 1);
}

#[test]
fn manifest_records_seed_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let status = lab().args(["geodesic", "--seed", "99", "--out"]).arg(dir.path()).status().unwrap();
    assert!(status.success());
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["seed"], 99);
    assert_eq!(m["subcommand"], "geodesic");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["experiments"][0]["status"], "ok");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[bulk]\nsitez = 4\n").unwrap();
    let status = lab().args(["bulk", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = lab().args(["teleport"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = lab().args(["bulk", "--config"]).arg(dir.path().join("missing.toml")).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, "").unwrap();
    let status = lab().args(["geodesic", "--out"]).arg(file.join("sub")).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn numeric_failures_are_recorded_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    // An interval below the UV cutoff has no geodesic.
    std::fs::write(&cfg, "[geodesic]\nintervals = [1e-5]\n").unwrap();
    let out = dir.path().join("out");
    let status = lab().args(["geodesic", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["experiments"][0]["status"], "failed");
    assert!(m["experiments"][0]["error"].as_str().unwrap().contains("cutoff"));
}
