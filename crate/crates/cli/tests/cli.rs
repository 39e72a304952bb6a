use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const BUNDLED_CMF: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/cie1931_2deg_1nm.csv");

fn ocs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocs")).args(args).env_remove("OCS_DATA_DIR").output().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn file_sha256(path: impl AsRef<Path>) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

#[test]
fn probe_target_reports_two_transitions() {
    let doc = json_stdout(&ocs(&["probe", "--target", "10,40,30"]));
    assert_eq!(doc["profile"]["count"], 2);
    assert_eq!(doc["profile"]["kind"], "type-i-like");
    assert_eq!(doc["rho"].as_array().unwrap().len(), 471);
    let data = &doc["provenance"]["data"][0];
    assert_eq!(data["source"], "bundled:cie1931_2deg_1nm.csv");
    assert_eq!(data["sha256"], file_sha256(BUNDLED_CMF).as_str());
    assert_eq!(doc["provenance"]["config"]["step_nm"], 1.0);
}

#[test]
fn probe_writes_reflectance_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let run = ocs(&["--step", "5", "probe", "--dir", "1.478858,0.371322", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("p.rho.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# provenance: {"));
    assert_eq!(lines.next().unwrap(), "wavelength_nm,rho");
    let rho: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let json_rho: Vec<f64> = doc["rho"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(rho, json_rho);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = ocs(&["probe", "--target", "10,40,30", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage:"), "{err}");
    assert_eq!(ocs(&["probe"]).status.code(), Some(2));
    assert_eq!(ocs(&["probe", "--target", "1,2"]).status.code(), Some(2));
}

#[test]
fn missing_data_is_a_data_error() {
    let out = ocs(&["--cmf", "/nonexistent/cmf.csv", "hull"]);
    assert_eq!(out.status.code(), Some(3));
    let out = ocs(&["--illuminant", "munsell:5Z 8/16", "probe", "--target", "10,40,30"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn repro_passes_on_bundled_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = ocs(&["repro", "--out-dir", dir.path().to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("repro.json")).unwrap()).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn repro_fails_verification_on_decimated_data() {
    let out = ocs(&["--step", "10", "repro"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL hull-count"));
}

#[test]
fn data_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cie1931_2deg_1nm.csv");
    std::fs::copy(BUNDLED_CMF, &path).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ocs"))
        .args(["hull"])
        .env("OCS_DATA_DIR", dir.path())
        .output()
        .unwrap();
    let doc = json_stdout(&out);
    assert_eq!(doc["hull_count"], 161);
    assert_eq!(doc["provenance"]["data"][0]["source"], path.display().to_string());
}

#[test]
fn generated_illuminant_has_requested_chromaticity() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("illum.csv");
    let run = ocs(&["--step", "5", "make-illuminant", "--x", "0.40", "--y", "0.42", "--out", csv.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json_stdout(&ocs(&["--step", "5", "--illuminant", csv.to_str().unwrap(), "probe", "--target", "30,30,20"]));
    let wp = &doc["provenance"]["white_point"];
    let (x, y, z) = (wp["X"].as_f64().unwrap(), wp["Y"].as_f64().unwrap(), wp["Z"].as_f64().unwrap());
    let s = x + y + z;
    assert!((x / s - 0.40).abs() < 1e-9 && (y / s - 0.42).abs() < 1e-9, "{x} {y} {z}");
    assert!((y - 100.0).abs() < 1e-9);
    assert_eq!(doc["provenance"]["data"][1]["sha256"], file_sha256(&csv).as_str());
}

#[test]
fn map_artifacts_carry_provenance_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for name in ["a", "b"] {
        let out = ocs(&["--step", "10", "--threads", "2", "map", "--size", "16", "--out-dir", d, "--name", name]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(dir.path().join("a.counts.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.counts.csv")).unwrap();
    assert!(a.starts_with("# provenance: {"));
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(body(&a), body(&b));
    assert_eq!(body(&a).len(), 16);
    let ppm = std::fs::read(dir.path().join("a.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n# provenance: {"));
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(sidecar["failures"], 0);
    assert_eq!(sidecar["provenance"]["config"]["threads"], 2);
    assert!(sidecar["palette"]["entries"].is_array());
}

#[test]
fn compare_records_match_two_transition_optima() {
    let doc = json_stdout(&ocs(&["--step", "10", "compare", "--random", "8", "--seed", "11"]));
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 8);
    for r in records {
        let delta = r["delta_distance"].as_f64().unwrap();
        assert!(delta > -1e-9, "{r}");
        if r["lp_transitions"] == 2 {
            assert!(delta.abs() <= 1e-8, "{r}");
        }
    }
}
