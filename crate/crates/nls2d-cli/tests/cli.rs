//! End-to-end checks of the `nls2d` binary: exit codes, machine-readable
//! errors, artifact schemas, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nls2d"))
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

#[test]
fn run_emits_five_files_for_the_demo_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(config_path("gaussian_demo_small.conf"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(files.len(), 5, "files: {files:?}");
    for expect in [
        "trajectory.csv",
        "summary.json",
        "plot.gp",
        "snapshot_initial.bin",
        "snapshot_final.bin",
    ] {
        assert!(files.contains(&expect.to_string()), "missing {expect}");
    }
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,mass,energy,e_iu,morawetz_action,commutator_l2\n"));
}

#[test]
fn config_errors_exit_with_code_two_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    let text = std::fs::read_to_string(config_path("gaussian_demo_small.conf"))
        .unwrap()
        .replace("dt = 0.001", "dt = 0");
    std::fs::write(&bad, text).unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(parsed["error"]["kind"], "config");
}

#[test]
fn numeric_failures_exit_with_code_three() {
    // an absurd amplitude overflows |u|^2 in the phase rotation and the
    // integrator reports non-finite samples
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("blowup.conf");
    let text = std::fs::read_to_string(config_path("gaussian_demo_small.conf"))
        .unwrap()
        .replace("amplitude = 1", "amplitude = 1e200");
    std::fs::write(&bad, text).unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(parsed["error"]["kind"], "numeric");
}

#[test]
fn plan_rejects_low_regularity_with_code_two() {
    let out = bin()
        .args(["plan", "--s", "0.2", "--t0", "1", "--m0", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_prints_the_scaling_plan() {
    let out = bin()
        .args(["plan", "--s", "0.5", "--t0", "10", "--m0", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let plan: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(plan["n_exponent"], 0.75);
    assert_eq!(plan["growth_exponent"], 0.125);
    // lambda = c0 * N^((1-s)/s) is re-derivable from the output fields
    let lambda = plan["lambda"].as_f64().unwrap();
    let cutoff = plan["cutoff"].as_f64().unwrap();
    assert!((lambda - cutoff.powf(1.0)).abs() <= 1e-12 * lambda);
}

#[test]
fn oracle_validate_exits_zero_and_reports_battery() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["oracle-validate", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = std::fs::read_to_string(dir.path().join("oracle_reports.jsonl")).unwrap();
    let count = lines.lines().count();
    assert_eq!(count, nls2d_cli::commands::battery_size());
    for line in lines.lines() {
        let report: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(report["rel_err"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn rerun_with_same_seed_is_byte_identical() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    for dir in [&dir1, &dir2] {
        let out = bin()
            .args(["run", "--config"])
            .arg(config_path("gaussian_demo_small.conf"))
            .arg("--out")
            .arg(dir.path())
            .arg("--seed")
            .arg("99")
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    for name in [
        "trajectory.csv",
        "summary.json",
        "plot.gp",
        "snapshot_initial.bin",
        "snapshot_final.bin",
    ] {
        let a = std::fs::read(dir1.path().join(name)).unwrap();
        let b = std::fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn regions_rerun_is_deterministic_and_region_one_vanishes() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    for dir in [&dir1, &dir2] {
        let out = bin()
            .args(["regions", "--samples", "5000", "--config"])
            .arg(config_path("gaussian_demo_small.conf"))
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    for i in 1..=4 {
        let name = format!("region{i}.json");
        let a = std::fs::read(dir1.path().join(&name)).unwrap();
        let b = std::fs::read(dir2.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let r1: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir1.path().join("region1.json")).unwrap()).unwrap();
    assert_eq!(r1["worst_sigma"], 0.0);
}

#[test]
fn morawetz_of_zero_field_reports_all_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.conf");
    let text = std::fs::read_to_string(config_path("gaussian_demo_small.conf"))
        .unwrap()
        .replace("amplitude = 1", "amplitude = 0");
    std::fs::write(&zero, text).unwrap();
    let out = bin()
        .args(["morawetz", "--config"])
        .arg(&zero)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("morawetz_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["u_level"]["lhs"], 0.0);
    assert_eq!(report["u_level"]["ratio"], 0.0);
    for iu in report["iu_level"].as_array().unwrap() {
        assert_eq!(iu["lhs"], 0.0);
        assert_eq!(iu["error_budget"], 0.0);
    }
    assert_eq!(report["positivity"]["min_term_hessian"], 0.0);
}

#[test]
fn sweep_writes_slope_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sweep-n", "--config"])
        .arg(config_path("linear_sweep.conf"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sweep = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("n_cutoff,sup_increment,commutator_l1l2\n"));
    // linear flow: every increment at roundoff
    for line in sweep.lines().skip(1) {
        let sup: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(sup <= 1e-10, "linear-flow increment {sup}");
    }
    let inc = std::fs::read_to_string(dir.path().join("increments.csv")).unwrap();
    assert!(inc.starts_with("n_cutoff,sup_increment,slope_so_far\n"));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["increment_slope"].is_number() || summary["increment_slope"].is_null());
}
