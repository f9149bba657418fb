//! End-to-end runs of the `verify` binary: exit codes, printed lines,
//! emitted files, config-file handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn verify() -> Command {
    Command::new(env!("CARGO_BIN_EXE_verify"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("braidlab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_at(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("report file exists");
    serde_json::from_str(&text).expect("report parses as json")
}

#[test]
fn runs_a_suite_and_writes_a_json_report() {
    let dir = temp_dir("json");
    let out_file = dir.join("report.json");
    let out = verify()
        .args(["grid-sanity", "--n-points", "32", "--out"])
        .arg(&out_file)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = stdout_of(&out);
    assert!(stdout.contains("[pass]"), "no pass lines in: {stdout}");
    assert!(stdout.contains("grid-sanity"));

    let doc = json_at(&out_file);
    assert_eq!(doc["suite"], "grid-sanity");
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["config"]["n-points"], "32");
    assert!(doc["records"].as_array().is_some_and(|r| !r.is_empty()));
    assert!(doc["timing"]["total_ms"].is_number());
}

#[test]
fn rejects_unknown_suite_and_lists_the_valid_ones() {
    let out = verify().arg("no-such-suite").output().expect("binary runs");
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no-such-suite"), "stderr: {stderr}");
    for name in ["grid-sanity", "lemma14", "crossed-T2"] {
        assert!(stderr.contains(name), "suite listing missing {name}: {stderr}");
    }
}

#[test]
fn csv_output_has_the_stable_header() {
    let dir = temp_dir("csv");
    let out_file = dir.join("report.csv");
    let out = verify()
        .args(["weyl", "--n-points", "32", "--format", "csv", "--out"])
        .arg(&out_file)
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_file).expect("csv written");
    let header = text.lines().next().unwrap_or("");
    assert_eq!(header, "suite,check,param_hash,residual,tolerance,pass");
    assert!(text.lines().skip(1).all(|l| l.is_empty() || l.starts_with("weyl,")));
}

#[test]
fn out_dir_env_picks_the_default_file_name() {
    let dir = temp_dir("envdir");
    let out = verify()
        .args(["grid-sanity", "--n-points", "32"])
        .env("BRAIDLAB_OUT_DIR", &dir)
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let expected = dir.join("grid-sanity.json");
    assert!(expected.is_file(), "missing {}", expected.display());
}

#[test]
fn config_file_applies_and_flags_override_it() {
    let dir = temp_dir("config");
    let cfg_file = dir.join("run.cfg");
    std::fs::write(&cfg_file, "# lattice size\nn-points = 16\nseed = 3\n").expect("write config");
    let out_file = dir.join("report.json");
    let out = verify()
        .arg("grid-sanity")
        .arg("--config")
        .arg(&cfg_file)
        .args(["--n-points", "32", "--out"])
        .arg(&out_file)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = json_at(&out_file);
    // the flag wins over the file, the file wins over the default
    assert_eq!(doc["config"]["n-points"], "32");
    assert_eq!(doc["config"]["seed"], "3");
}

#[test]
fn bad_config_line_reports_the_location() {
    let dir = temp_dir("badcfg");
    let cfg_file = dir.join("broken.cfg");
    std::fs::write(&cfg_file, "n-points = 16\nwhat is this\n").expect("write config");
    let out = verify()
        .arg("grid-sanity")
        .arg("--config")
        .arg(&cfg_file)
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("broken.cfg"), "stderr: {stderr}");
    assert!(stderr.contains(":2"), "line number missing: {stderr}");
}

#[test]
fn impossible_tolerance_scale_fails_the_run() {
    let out = verify()
        .args(["grid-sanity", "--n-points", "32", "--tolerance-scale", "1e-30"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
    let stdout = stdout_of(&out);
    assert!(stdout.contains("FAIL"), "no FAIL lines in: {stdout}");
}

#[test]
fn object_descriptor_flags_reach_the_suite() {
    let dir = temp_dir("objects");
    let out_file = dir.join("report.json");
    // window of 8 pi puts dp at exactly 0.25, so both action frequencies
    // land on the momentum lattice
    let out = verify()
        .args([
            "lemma15",
            "--n-points",
            "48",
            "--length",
            "25.132741228718344",
            "--object-a",
            "sigma_z omega=0.25",
            "--object-b",
            "sigma_z omega=0.125",
            "--out",
        ])
        .arg(&out_file)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = json_at(&out_file);
    // sigma_z sugar expands to an explicit two-level matrix object
    let echoed = doc["config"]["object-a"].as_str().unwrap_or("");
    assert!(echoed.contains("matrix") && echoed.contains("0.25"), "object echo: {echoed}");
}

#[test]
fn malformed_descriptor_is_rejected_before_running() {
    let out = verify()
        .args(["lemma15", "--object-a", "three-level dim=3"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("three-level"), "stderr: {stderr}");
}
