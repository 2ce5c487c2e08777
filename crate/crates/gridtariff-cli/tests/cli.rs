//! Exit codes, error JSON, and subcommand behavior of the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridtariff"))
}

fn toy4() -> PathBuf {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/toy4")).to_path_buf()
}

fn stderr_json(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    let line = text
        .lines()
        .last()
        .unwrap_or_else(|| panic!("empty stderr"));
    serde_json::from_str(line).unwrap_or_else(|err| panic!("bad error JSON {line:?}: {err}"))
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited")
}

#[test]
fn version_names_engine_and_format_revision() {
    let output = bin().arg("--version").output().unwrap();
    assert_eq!(exit_code(&output), 0);
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.trim(), "gridtariff 0.1.0 (data format revision 1)");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let output = bin().arg("explode").output().unwrap();
    assert_eq!(exit_code(&output), 1);
}

#[test]
fn missing_threshold_names_the_flag() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--design", "ipp"])
        .arg("--data")
        .arg(toy4())
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 1);
    let err = stderr_json(&output);
    assert_eq!(err["error"], "usage");
    assert!(err["message"].as_str().unwrap().contains("--threshold"));
}

#[test]
fn extraneous_trigger_is_rejected() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--design", "flat", "--trigger", "0.05"])
        .arg("--data")
        .arg(toy4())
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stderr_json(&output)["error"], "usage");
}

#[test]
fn out_of_range_trigger_is_a_usage_error() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--design", "dcpp", "--trigger", "1.5"])
        .arg("--data")
        .arg(toy4())
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stderr_json(&output)["error"], "usage");
}

#[test]
fn missing_data_directory_is_a_data_error() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--design", "flat"])
        .arg("--data")
        .arg("/nonexistent/data")
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 2);
    assert_eq!(stderr_json(&output)["error"], "missing_file");
}

#[test]
fn corrupt_csv_is_a_schema_error() {
    let data_dir = tempfile::tempdir().unwrap();
    for name in ["categories.csv", "profiles.csv", "system_load.csv"] {
        std::fs::copy(toy4().join(name), data_dir.path().join(name)).unwrap();
    }
    std::fs::write(
        data_dir.path().join("system_load.csv"),
        "hour,load_mw\n0,ten\n",
    )
    .unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--design", "flat"])
        .arg("--data")
        .arg(data_dir.path())
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 2);
    assert_eq!(stderr_json(&output)["error"], "schema_violation");
}

#[test]
fn unreachable_peak_revenue_exits_3() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--design", "ipp", "--threshold", "99"])
        .arg("--data")
        .arg(toy4())
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 3);
    assert_eq!(stderr_json(&output)["error"], "infeasible_peak_recovery");
}

#[test]
fn run_writes_reports_on_the_toy() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "run",
            "--design",
            "dcipp",
            "--threshold",
            "2",
            "--trigger",
            "0.25",
        ])
        .arg("--data")
        .arg(toy4())
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(
        exit_code(&output),
        0,
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let rates = std::fs::read_to_string(out_dir.path().join("rates.csv")).unwrap();
    assert!(rates.contains("\"DCIPP;(2kWh,25%)\""), "{rates}");
    assert!(out_dir.path().join("manifest.json").exists());
}

#[test]
fn oracle_check_passes_on_the_toy() {
    let output = bin()
        .arg("oracle-check")
        .arg("--data")
        .arg(toy4())
        .output()
        .unwrap();
    assert_eq!(
        exit_code(&output),
        0,
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("oracle check passed"), "{text}");
}

#[test]
fn sweep_reports_infeasible_scenarios_and_exits_3() {
    let spec_dir = tempfile::tempdir().unwrap();
    let spec_path = spec_dir.path().join("sweep.json");
    std::fs::write(
        &spec_path,
        r#"{
            "gt_flat": 18.25,
            "scenarios": [
                { "kind": "flat" },
                { "kind": "ipp", "threshold_kwh": 99.0 }
            ]
        }"#,
    )
    .unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let output = bin()
        .arg("sweep")
        .arg("--data")
        .arg(toy4())
        .arg("--spec")
        .arg(&spec_path)
        .arg("--out")
        .arg(out_dir.path())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 3);
    let rates = std::fs::read_to_string(out_dir.path().join("rates.csv")).unwrap();
    assert!(rates.contains("Flat,"), "{rates}");
    assert!(!rates.contains("IPP;99kWh"), "{rates}");
    let failures = std::fs::read_to_string(out_dir.path().join("failures.csv")).unwrap();
    assert!(
        failures.contains("IPP;99kWh,infeasible_peak_recovery"),
        "{failures}"
    );
}

#[test]
fn report_rejects_unknown_dimension() {
    let output = bin()
        .args([
            "report",
            "--results",
            "/tmp",
            "--group-by",
            "dwelling,bogus",
        ])
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 1);
    let err = stderr_json(&output);
    assert_eq!(err["error"], "usage");
    assert!(err["message"].as_str().unwrap().contains("bogus"));
}

#[test]
fn generate_is_deterministic_across_invocations() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [dir_a.path(), dir_b.path()] {
        let output = bin()
            .args(["generate", "--seed", "5"])
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(
            exit_code(&output),
            0,
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    for name in [
        "categories.csv",
        "profiles.csv",
        "system_load.csv",
        "provenance.json",
    ] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn generate_accepts_partial_config() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, r#"{"default_n_households": 10}"#).unwrap();
    let out = dir.path().join("data");
    let output = bin()
        .args(["generate", "--seed", "5"])
        .arg("--out")
        .arg(&out)
        .arg("--config")
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(
        exit_code(&output),
        0,
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let categories = std::fs::read_to_string(out.join("categories.csv")).unwrap();
    for line in categories.lines().skip(1) {
        assert!(line.ends_with(",10"), "{line}");
    }
    let provenance = std::fs::read_to_string(out.join("provenance.json")).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&provenance).unwrap();
    assert_eq!(meta["config"]["seed"], 5);
    assert_eq!(meta["config"]["default_n_households"], 10);
}
