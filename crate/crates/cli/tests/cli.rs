//! End-to-end tests of the `superwave` binary: exit codes, error JSON,
//! artifact contents, and run manifests.

use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn superwave(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superwave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr_json(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    let line = text
        .lines()
        .find(|l| l.starts_with('{'))
        .unwrap_or_else(|| panic!("no JSON on stderr: {text}"));
    serde_json::from_str(line).unwrap()
}

#[test]
fn unknown_config_key_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("design.json");
    std::fs::write(
        &cfg,
        r#"{"omega": 2.0, "n": 6, "m": 6, "zeros": [], "bogus_key": 1}"#,
    )
    .unwrap();
    let out = superwave(
        &["construct", "forced-zeros", "--config", cfg.to_str().unwrap()],
        &dir.path().join("run"),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["exit_code"], 2);
    assert_eq!(err["kind"], "parse");
    let msg = err["error"].as_str().unwrap();
    assert!(msg.contains("bogus_key"), "message should name the key: {msg}");
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = superwave(
        &["analyze", "--input", "/nonexistent/field.swf"],
        &dir.path().join("run"),
    );
    assert_eq!(out.status.code(), Some(4));
    let err = stderr_json(&out);
    assert_eq!(err["kind"], "io");
    assert_eq!(err["exit_code"], 4);
}

#[test]
fn invalid_grid_is_rejected_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = superwave(
        &["construct", "product", "--samples", "0"],
        &dir.path().join("run"),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn product_analysis_reports_the_superoscillation() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let out = superwave(&["construct", "product"], &run);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(run.join("analysis.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let xi = header.iter().position(|&h| h == "x").unwrap();
    let ki = header.iter().position(|&h| h == "k_local").unwrap();
    // Row nearest x = 0 carries the designed local wavenumber a = 6.
    let mut best = (f64::INFINITY, 0.0);
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        if cells[xi].abs() < best.0 {
            best = (cells[xi].abs(), cells[ki]);
        }
    }
    assert!((best.1 - 6.0).abs() < 1e-4, "k near 0 = {}", best.1);
}

#[test]
fn manifest_lists_outputs_with_correct_digests() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let out = superwave(
        &["fit", "interval", "--omega", "10", "--n", "9"],
        &run,
    );
    assert!(out.status.success());

    let stdout: serde_json::Value =
        serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stdout["status"], "ok");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["config_hash"].as_str().unwrap().len() == 64);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for entry in outputs {
        let name = entry["path"].as_str().unwrap();
        let bytes = std::fs::read(run.join(name)).unwrap();
        let digest = format!("{:x}", Sha256::digest(&bytes));
        assert_eq!(entry["sha256"].as_str().unwrap(), digest, "{name}");
    }
}

#[test]
fn rerun_with_identical_config_warns() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let args = ["construct", "taylor", "--n", "8", "--a", "3.0"];
    let first = superwave(&args, &run);
    assert!(first.status.success());
    let second = superwave(&args, &run);
    assert!(second.status.success());
    let text = String::from_utf8_lossy(&second.stderr);
    assert!(
        text.contains("identical configuration"),
        "expected rerun warning, got: {text}"
    );
}

#[test]
fn binary_and_csv_field_round_trip_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["field.swf", "field.csv"] {
        let make = dir.path().join(format!("make_{name}"));
        let out = superwave(
            &["construct", "product", "--field-out", name],
            &make,
        );
        assert!(out.status.success());
        let analyze = dir.path().join(format!("analyze_{name}"));
        let out = superwave(
            &[
                "analyze",
                "--input",
                make.join(name).to_str().unwrap(),
                "--scheme",
                "central4",
            ],
            &analyze,
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(analyze.join("analysis.csv").exists());
    }
}
