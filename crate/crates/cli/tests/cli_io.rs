// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end checks of the command-line interface: exit codes, file
//! formats, preset plumbing and determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

use tickwork_cli::output::{fmt_sig, read_csv};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tickwork"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tickwork-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_file(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn steady_fig3_reports_closed_form_population() {
    let dir = temp_dir("steady");
    let out = bin()
        .args(["steady", "--preset", "fig3", "--seed", "7"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p_m = doc["steady"]["populations"]["p_m"].as_f64().unwrap();
    assert!((p_m - 0.30769).abs() < 1e-4, "p_m = {p_m}");
    assert!(doc["steady"]["mandel_q"].as_f64().unwrap() < 0.0);
    // The same document lands in the summary file.
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("steady_fig3_summary.json")).unwrap())
            .unwrap();
    assert_eq!(file["steady"]["populations"]["p_m"], doc["steady"]["populations"]["p_m"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn steady_without_pump_has_empty_tick_level() {
    let dir = temp_dir("steady0");
    let config = write_file(&dir, "cfg.json", r#"{"model": {"gamma_m": 0.0}}"#);
    let out = bin()
        .args(["steady", "--preset", "fig3", "--seed", "1"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["steady"]["populations"]["p_m"].as_f64().unwrap().abs() < 1e-10);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_config_exits_2() {
    let dir = temp_dir("badcfg");
    let config = write_file(&dir, "broken.json", "{ not json");
    let out = bin()
        .args(["steady", "--preset", "fig3"])
        .args(["--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Valid JSON, invalid physics.
    let config = write_file(&dir, "negative.json", r#"{"model": {"gamma_m": -1.0}}"#);
    let out = bin()
        .args(["steady", "--preset", "fig3"])
        .args(["--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solver_failure_exits_3() {
    let dir = temp_dir("solverfail");
    // All rates zero: purely unitary generator, degenerate null space.
    let config = write_file(
        &dir,
        "cfg.json",
        r#"{"model": {"gamma_m": 0.0, "gamma_c": 0.0, "gamma_w": 0.0}}"#,
    );
    let out = bin()
        .args(["steady", "--preset", "fig3", "--seed", "1"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-unique steady state"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn plan_limit_violation_exits_2() {
    let dir = temp_dir("plan");
    // max(rate)·dt = 4·0.5 ≥ 1.
    let config = write_file(&dir, "cfg.json", r#"{"plan": {"dt": 0.5, "n_steps": 10}}"#);
    let out = bin()
        .args(["simulate", "--preset", "fig3", "--seed", "1"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn ldt_csv_matches_analytic_curve() {
    let dir = temp_dir("ldt");
    let config = write_file(&dir, "cfg.json", r#"{"model": {"gamma_m": 1.0}, "sweep": null}"#);
    let out = bin()
        .args(["ldt", "--preset", "fig2", "--seed", "3"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (columns, rows) = read_csv(&dir.join("ldt_fig2.csv")).unwrap();
    assert_eq!(columns, vec!["s", "theta"]);
    assert_eq!(rows.len(), 81);
    for row in &rows {
        let (s, theta) = (row[0], row[1]);
        let exact = tickwork_core::ldt::analytic_scgf_two_level(1.0, 6.0, s);
        assert!((theta - exact).abs() <= 1e-9, "s={s}");
        if s == 0.0 {
            assert_eq!(theta, 0.0);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn emitted_csv_reparses_exactly_at_printed_precision() {
    let dir = temp_dir("roundtrip");
    let config = write_file(
        &dir,
        "cfg.json",
        r#"{"plan": {"n_traj": 50}, "sweep": null}"#,
    );
    let out = bin()
        .args(["simulate", "--preset", "fig2", "--seed", "11"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let path = dir.join("simulate_fig2.csv");
    let (_, rows) = read_csv(&path).unwrap();
    // Re-formatting every parsed cell must reproduce the file body.
    let text = std::fs::read_to_string(&path).unwrap();
    let body: Vec<&str> = text.lines().skip(2).collect();
    for (line, row) in body.iter().zip(&rows) {
        let rebuilt: Vec<String> = row.iter().map(|&x| fmt_sig(x)).collect();
        assert_eq!(*line, rebuilt.join(","));
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_is_deterministic_across_runs_and_thread_counts() {
    let dir = temp_dir("det");
    let config = write_file(
        &dir,
        "cfg.json",
        r#"{"plan": {"n_traj": 120}, "sweep": null, "outputs": {"svg": "det.svg"}}"#,
    );
    let run = |out_sub: &str, threads: &str| {
        let out_dir = dir.join(out_sub);
        std::fs::create_dir_all(&out_dir).unwrap();
        let out = bin()
            .args(["simulate", "--preset", "fig2", "--seed", "7"])
            .args(["--config", config.to_str().unwrap()])
            .args(["--out", out_dir.to_str().unwrap()])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (
            std::fs::read(out_dir.join("simulate_fig2.csv")).unwrap(),
            std::fs::read(out_dir.join("simulate_fig2_summary.json")).unwrap(),
            std::fs::read(out_dir.join("det.svg")).unwrap(),
        )
    };
    let a = run("a", "2");
    let b = run("b", "2");
    let single = run("c", "1");
    assert_eq!(a, b, "same seed, same thread count");
    assert_eq!(a, single, "same seed, different parallelism");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_header_carries_config_hash_and_seed() {
    let dir = temp_dir("header");
    let config = write_file(&dir, "cfg.json", r#"{"plan": {"n_traj": 20}, "sweep": null}"#);
    let out = bin()
        .args(["simulate", "--preset", "fig2", "--seed", "42"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("simulate_fig2.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# config_hash="));
    assert!(header.ends_with("seed=42"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_exit_codes() {
    let ok = bin().arg("validate").output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let injected = bin()
        .args(["validate", "--inject-bad-kraus"])
        .output()
        .unwrap();
    assert_eq!(injected.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&injected.stdout);
    assert!(stdout.contains("FAIL kraus-completeness"));
    assert!(stdout.contains("\"failures\""));

    let too_tight = bin().args(["validate", "--tol", "1e-15"]).output().unwrap();
    assert_eq!(too_tight.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&too_tight.stdout).contains("FAIL gaussian-completeness"));
}

#[test]
fn sweep_flag_produces_per_point_files() {
    let dir = temp_dir("sweep");
    let config = write_file(&dir, "cfg.json", r#"{"plan": {"n_traj": 30}}"#);
    let out = bin()
        .args(["simulate", "--preset", "fig2", "--seed", "5"])
        .args(["--config", config.to_str().unwrap()])
        .args(["--sweep", "gamma_m=0.5:3:3"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (columns, rows) = read_csv(&dir.join("simulate_fig2.csv")).unwrap();
    assert_eq!(columns[0], "sweep_value");
    assert_eq!(rows.len(), 3);
    assert!(dir.join("simulate_fig2_p00.csv").exists());
    assert!(dir.join("simulate_fig2_p02.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}
