//! End-to-end checks of the experiment runner: exit codes, emitted files,
//! byte-identical reproducibility, config-file handling.

use std::fs;
use std::path::Path;
use std::process::Command;

fn ubm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ubm"))
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn dos_smoke_and_reproducibility() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [dir_a.path(), dir_b.path()] {
        let status = ubm()
            .args([
                "--out-dir",
                dir.to_str().unwrap(),
                "dos",
                "--uniform",
                "--size",
                "60",
                "--realizations",
                "6",
                "--seed",
                "7",
                "--dump-phases",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    // CSV bodies byte-identical; only the manifest holds timing
    for name in ["dos_hist.csv", "dos_phases.csv", "dos_summary.json"] {
        assert_eq!(read(dir_a.path(), name), read(dir_b.path(), name), "{name} differs");
    }
    let hist = read(dir_a.path(), "dos_hist.csv");
    assert!(hist.starts_with("# claim: "), "CSV must name its claim");
    let manifest: serde_json::Value =
        serde_json::from_str(&read(dir_a.path(), "dos_manifest.json")).unwrap();
    assert_eq!(manifest["command"], "dos");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["size"], 60);
    assert!(manifest["outputs"].as_array().unwrap().len() >= 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dos.json");
    fs::write(&cfg, r#"{"size": 60, "realizations": 5, "seed": 3, "bins": 64}"#).unwrap();
    let status = ubm()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "dos",
            "--config",
            cfg.to_str().unwrap(),
            "--realizations",
            "4",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "dos_manifest.json")).unwrap();
    assert_eq!(manifest["config"]["size"], 60, "file value kept");
    assert_eq!(manifest["config"]["realizations"], 4, "flag overrides file");
    assert_eq!(manifest["config"]["bins"], 64);
}

#[test]
fn env_out_dir_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let status = ubm()
        .env("UBM_OUT_DIR", dir.path())
        .args(["free-exact", "--points", "32"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("free.csv").exists());
    assert!(dir.path().join("free-exact_manifest.json").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    // invalid distribution grammar
    let s1 = ubm()
        .args(["--out-dir", &out, "dos", "--theta", "gauss:0:1", "--size", "60"])
        .status()
        .unwrap();
    assert_eq!(s1.code(), Some(2));
    // odd window size
    let s2 = ubm().args(["--out-dir", &out, "dos", "--size", "61"]).status().unwrap();
    assert_eq!(s2.code(), Some(2));
    // exact paths need the balanced case
    let s3 = ubm()
        .args(["--out-dir", &out, "paths", "--n", "4", "--exact", "--r", "0.6"])
        .status()
        .unwrap();
    assert_eq!(s3.code(), Some(2));
    // clap-level parse failure
    let s4 = ubm().args(["no-such-command"]).status().unwrap();
    assert_eq!(s4.code(), Some(2));
}

#[test]
fn selftest_passes_and_detects_injected_fault() {
    let ok = ubm().arg("selftest").output().unwrap();
    assert!(ok.status.success());
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));

    let bad = ubm().args(["selftest", "--inject-fault", "det-sign"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(4));
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("determinant phase identity: FAIL"));
}

#[test]
fn support_and_analyticity_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let status = ubm()
        .args([
            "--out-dir",
            &out,
            "support-check",
            "--eta",
            "arc:0:0.3",
            "--size",
            "80",
            "--realizations",
            "4",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "support_summary.json")).unwrap();
    assert!(summary["outliers"]["total"].as_u64().unwrap() >= 320);

    let status = ubm()
        .args(["--out-dir", &out, "analyticity", "--amp", "1.0", "--decay", "1.0"])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "analyticity_summary.json")).unwrap();
    assert_eq!(summary["report"]["analytic"], true);
    assert_eq!(summary["report"]["all_r"], true);
}

#[test]
fn lyapunov_free_grid() {
    let dir = tempfile::tempdir().unwrap();
    let status = ubm()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "lyapunov",
            "--free",
            "--lambdas",
            "0.3,2.2,3.0",
            "--steps",
            "5000",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(dir.path(), "lyapunov.csv");
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    // free cocycle column ≈ closed-form column
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((cols[3] - cols[5]).abs() < 0.01, "{row}");
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(dir_a.path(), "1"), (dir_b.path(), "2")] {
        let status = ubm()
            .args([
                "--out-dir",
                dir.to_str().unwrap(),
                "--threads",
                threads,
                "dos",
                "--size",
                "60",
                "--realizations",
                "8",
                "--seed",
                "11",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["dos_hist.csv", "dos_summary.json"] {
        assert_eq!(
            read(dir_a.path(), name),
            read(dir_b.path(), name),
            "{name} depends on the worker-pool size"
        );
    }
}
