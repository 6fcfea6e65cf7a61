use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use allspeed::cli::{build_config, read_field_csv, to_config_text, ConfigDocument};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn allspeed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_allspeed")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn smoke_run_writes_outputs() {
    let out = tempfile::tempdir().unwrap();
    let cfg = configs().join("smoke_uniform.cfg");
    let o = allspeed(&[cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap(), "-q"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    for f in ["field.csv", "residuals.csv", "summary.json"] {
        assert!(out.path().join(f).exists(), "{f} missing");
    }
    let rows = read_field_csv(&out.path().join("field.csv")).unwrap();
    assert_eq!(rows.len(), 64);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["case"], "uniform");
    assert_eq!(summary["converged"], true);
}

#[test]
fn every_shipped_config_resolves() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let o = allspeed(&[path.to_str().unwrap(), "--dump-config"]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        let dumped = String::from_utf8(o.stdout).unwrap();
        let direct = build_config(&ConfigDocument::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()).unwrap();
        assert_eq!(dumped, to_config_text(&direct), "{}", path.display());
    }
}

#[test]
fn scheme_and_mach_overrides() {
    let cfg = configs().join("fig03_cylinder_pressure.cfg");
    let o = allspeed(&[cfg.to_str().unwrap(), "--scheme", "p-roe", "--mach", "0.05", "--dump-config"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let back = build_config(&ConfigDocument::parse(&text).unwrap()).unwrap();
    assert_eq!(back.manifest.mach, 0.05);
    assert_eq!(back.manifest.scheme.dissipation.name(), "p-roe");
    assert_eq!(back.manifest.scheme.m_ref, 0.05);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write_config(dir.path(), "[case]\nname = uniform\nmahc = 0.1\n");
    let o = allspeed(&[&bad_key]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));

    let sod = configs().join("fig09_10_sod.cfg");
    assert_eq!(allspeed(&[sod.to_str().unwrap(), "--mach", "0.1"]).status.code(), Some(2));
    assert_eq!(allspeed(&["/nonexistent/run.cfg"]).status.code(), Some(2));
    let bad_scheme = configs().join("smoke_uniform.cfg");
    assert_eq!(allspeed(&[bad_scheme.to_str().unwrap(), "--scheme", "no-such", "--dump-config"]).status.code(), Some(2));
}

#[test]
fn run_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // a regular file where the output directory should go
    std::fs::write(&out, "").unwrap();
    let cfg = configs().join("smoke_uniform.cfg");
    let o = allspeed(&[cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap(), "-q"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sod_profile_is_written() {
    let out = tempfile::tempdir().unwrap();
    let cfg = configs().join("fig09_10_sod.cfg");
    let o = allspeed(&[cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap(), "-q"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let profile = std::fs::read_to_string(out.path().join("profile.csv")).unwrap();
    assert_eq!(profile.lines().count(), 201);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["density_l1"].as_f64().unwrap() <= 0.02);
}
