// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! The four subcommands: steady-state report, tilted-spectrum predictions,
//! trajectory simulation, and the self-check suites.

use std::path::{Path, PathBuf};

use serde_json::json;
use tickwork_core::clockmodel::ClockModel;
use tickwork_core::ldt;
use tickwork_core::stats;
use tickwork_core::trajectory;
use tickwork_core::validate::{run_all, ValidationConfig};

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_sig, write_csv, write_json};
use crate::svg::{write_plot, Series};

/// Command failures mapped to exit codes: config errors exit 2, numerical
/// and I/O failures exit 3, validation failures exit 1.
#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Numerical(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Config(e) => write!(f, "{e}"),
            CmdError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CmdError::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Numerical(_) | CmdError::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

fn numerical(e: impl std::fmt::Display) -> CmdError {
    CmdError::Numerical(e.to_string())
}

struct OutPaths {
    csv: PathBuf,
    json: PathBuf,
    svg: Option<PathBuf>,
}

fn out_paths(config: &ExperimentConfig, out_dir: &Path, command: &str) -> OutPaths {
    let stem = match &config.preset {
        Some(p) => format!("{command}_{p}"),
        None => command.to_string(),
    };
    let resolve = |explicit: &Option<String>, default: String| match explicit {
        Some(path) => out_dir.join(path),
        None => out_dir.join(default),
    };
    OutPaths {
        csv: resolve(&config.outputs.csv, format!("{stem}.csv")),
        json: resolve(&config.outputs.json, format!("{stem}_summary.json")),
        svg: config.outputs.svg.as_ref().map(|p| out_dir.join(p)),
    }
}

fn summary_json(model: &ClockModel, summary: &ldt::LdtSummary) -> serde_json::Value {
    let populations = match summary.populations.len() {
        2 => json!({"p_e": summary.populations[0], "p_g": summary.populations[1]}),
        _ => json!({
            "p_m": summary.populations[0],
            "p_c": summary.populations[1],
            "p_g": summary.populations[2],
        }),
    };
    json!({
        "populations": populations,
        "coherence_mg_sq": summary.coherence_mg_sq,
        "gamma_tick": summary.gamma_tick,
        "mandel_q": summary.mandel_q,
        "clockwork_power": if model.dim() == 3 {
            serde_json::Value::from(summary.clockwork_power)
        } else {
            serde_json::Value::Null
        },
        "pop_ratio_m_over_c": summary.clockwork_pop_ratio,
    })
}

/// `steady`: steady-state populations and derived clock figures of merit.
pub fn cmd_steady(config: &ExperimentConfig, out_dir: &Path, seed: u64) -> Result<(), CmdError> {
    let model = config.model.to_model();
    let summary = ldt::summarize(&model).map_err(numerical)?;
    let doc = json!({
        "config_hash": format!("{:016x}", config.hash()),
        "seed": seed,
        "model": serde_json::to_value(&config.model).expect("model serializes"),
        "steady": summary_json(&model, &summary),
    });
    let paths = out_paths(config, out_dir, "steady");
    write_json(&paths.json, &doc)?;
    println!("{}", serde_json::to_string_pretty(&doc).expect("json serializes"));
    Ok(())
}

/// `ldt`: the SCGF curve Θ(s), asymptotic moments and Mandel Q; per-sweep
/// predictions when a sweep is configured.
pub fn cmd_ldt(config: &ExperimentConfig, out_dir: &Path, seed: u64) -> Result<(), CmdError> {
    let model = config.model.to_model();
    let hash = config.hash();
    let paths = out_paths(config, out_dir, "ldt");

    let curve = ldt::LdtCurve::sample(
        &model,
        config.s_grid.min,
        config.s_grid.max,
        config.s_grid.points,
    )
    .map_err(numerical)?;
    let rows: Vec<Vec<f64>> = curve
        .s_values
        .iter()
        .zip(&curve.scgf_values)
        .map(|(&s, &theta)| vec![s, theta])
        .collect();
    write_csv(&paths.csv, hash, seed, &["s", "theta"], &rows)?;

    let (d1, d2) = ldt::scgf_derivatives(&model).map_err(numerical)?;
    let mut doc = json!({
        "config_hash": format!("{hash:016x}"),
        "seed": seed,
        "model": serde_json::to_value(&config.model).expect("model serializes"),
        "curve_csv": paths.csv.display().to_string(),
        "mean_rate": -d1,
        "var_rate": d2,
        "mandel_q": if d1 < 0.0 { serde_json::Value::from(-d2 / d1 - 1.0) } else { serde_json::Value::Null },
    });

    if let Some(sweep) = &config.sweep {
        let mut sweep_rows = Vec::with_capacity(sweep.values.len());
        for &value in &sweep.values {
            let swept = config.model.with_parameter(&sweep.parameter, value)?;
            let (d1, d2) = ldt::scgf_derivatives(&swept.to_model()).map_err(numerical)?;
            let rate = -d1;
            let q = if rate > 1e-12 { d2 / rate - 1.0 } else { 0.0 };
            sweep_rows.push(vec![value, rate, d2, q]);
        }
        let sweep_csv = paths.csv.with_file_name(format!(
            "{}_sweep.csv",
            paths.csv.file_stem().unwrap_or_default().to_string_lossy()
        ));
        write_csv(
            &sweep_csv,
            hash,
            seed,
            &["sweep_value", "gamma_tick", "var_rate", "mandel_q"],
            &sweep_rows,
        )?;
        doc["sweep_parameter"] = json!(sweep.parameter);
        doc["sweep_csv"] = json!(sweep_csv.display().to_string());
    }

    write_json(&paths.json, &doc)?;
    println!("ldt: wrote {}", paths.csv.display());
    Ok(())
}

struct SimulatedPoint {
    sweep_value: Option<f64>,
    stats: stats::CountWindowStats,
    q_per_window: Vec<(f64, f64)>,
    ldt_mean_rate: f64,
    ldt_var_rate: f64,
}

fn simulate_point(
    model: &ClockModel,
    config: &ExperimentConfig,
    seed: u64,
    sweep_value: Option<f64>,
) -> Result<SimulatedPoint, CmdError> {
    let plan = config.plan.to_plan(seed)?;
    let warnings = plan
        .validate(model)
        .map_err(|e| CmdError::Config(ConfigError::Invalid(e.to_string())))?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    let ensemble = trajectory::run_ensemble(model, &plan).map_err(numerical)?;
    let stats = stats::count_stats(&ensemble, &config.windows).map_err(numerical)?;
    let q_per_window = (0..config.windows.len())
        .map(|i| stats::mandel_q_estimate(&stats, i).unwrap_or((f64::NAN, f64::NAN)))
        .collect();
    let (d1, d2) = ldt::scgf_derivatives(model).map_err(numerical)?;
    Ok(SimulatedPoint {
        sweep_value,
        stats,
        q_per_window,
        ldt_mean_rate: -d1,
        ldt_var_rate: d2,
    })
}

fn point_csv_rows(point: &SimulatedPoint) -> Vec<Vec<f64>> {
    point
        .stats
        .window_end_times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                t,
                point.stats.mean_counts[i],
                point.stats.var_counts[i],
                point.stats.se_mean[i],
                point.stats.se_var[i],
                point.q_per_window[i].0,
                point.q_per_window[i].1,
            ]
        })
        .collect()
}

fn point_json(point: &SimulatedPoint) -> serde_json::Value {
    let windows: Vec<serde_json::Value> = point
        .stats
        .window_end_times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let ldt_mean = point.ldt_mean_rate * t;
            let ldt_var = point.ldt_var_rate * t;
            json!({
                "t": t,
                "mean": point.stats.mean_counts[i],
                "var": point.stats.var_counts[i],
                "se_mean": point.stats.se_mean[i],
                "se_var": point.stats.se_var[i],
                "q_hat": point.q_per_window[i].0,
                "se_q": point.q_per_window[i].1,
                "ldt_mean": ldt_mean,
                "ldt_var": ldt_var,
                "mean_within_3se": (point.stats.mean_counts[i] - ldt_mean).abs()
                    <= 3.0 * point.stats.se_mean[i],
                "var_within_3se": (point.stats.var_counts[i] - ldt_var).abs()
                    <= 3.0 * point.stats.se_var[i],
            })
        })
        .collect();
    json!({
        "sweep_value": point.sweep_value,
        "ldt_mean_rate": point.ldt_mean_rate,
        "ldt_var_rate": point.ldt_var_rate,
        "windows": windows,
    })
}

/// `simulate`: seeded trajectory ensembles with windowed count statistics,
/// compared window by window against the spectral predictions.
pub fn cmd_simulate(config: &ExperimentConfig, out_dir: &Path, seed: u64) -> Result<(), CmdError> {
    let hash = config.hash();
    let paths = out_paths(config, out_dir, "simulate");

    let mut points = Vec::new();
    match &config.sweep {
        None => points.push(simulate_point(&config.model.to_model(), config, seed, None)?),
        Some(sweep) => {
            for &value in &sweep.values {
                let swept = config.model.with_parameter(&sweep.parameter, value)?;
                points.push(simulate_point(&swept.to_model(), config, seed, Some(value))?);
            }
        }
    }

    // One CSV per simulated parameter point, fixed column set.
    let columns = ["window_t", "mean_N", "var_N", "se_mean", "se_var", "q_hat", "se_q"];
    if points.len() == 1 {
        write_csv(&paths.csv, hash, seed, &columns, &point_csv_rows(&points[0]))?;
    } else {
        for (idx, point) in points.iter().enumerate() {
            let path = paths.csv.with_file_name(format!(
                "{}_p{idx:02}.csv",
                paths.csv.file_stem().unwrap_or_default().to_string_lossy()
            ));
            write_csv(&path, hash, seed, &columns, &point_csv_rows(point))?;
        }
        // Final-window summary across the sweep.
        let last = config.windows.len() - 1;
        let sweep_rows: Vec<Vec<f64>> = points
            .iter()
            .map(|p| {
                vec![
                    p.sweep_value.unwrap_or(f64::NAN),
                    p.stats.mean_counts[last],
                    p.stats.var_counts[last],
                    p.stats.se_mean[last],
                    p.stats.se_var[last],
                    p.q_per_window[last].0,
                    p.q_per_window[last].1,
                ]
            })
            .collect();
        write_csv(
            &paths.csv,
            hash,
            seed,
            &["sweep_value", "mean_N", "var_N", "se_mean", "se_var", "q_hat", "se_q"],
            &sweep_rows,
        )?;
    }

    let doc = json!({
        "config_hash": format!("{hash:016x}"),
        "seed": seed,
        "config": serde_json::to_value(config).expect("config serializes"),
        "points": points.iter().map(point_json).collect::<Vec<_>>(),
    });
    write_json(&paths.json, &doc)?;

    if let Some(svg_path) = &paths.svg {
        render_simulation_svg(svg_path, config, &points)?;
    }

    let flags: Vec<bool> = points
        .iter()
        .flat_map(|p| {
            p.stats.window_end_times.iter().enumerate().map(|(i, &t)| {
                (p.stats.mean_counts[i] - p.ldt_mean_rate * t).abs() <= 3.0 * p.stats.se_mean[i]
            })
        })
        .collect();
    println!(
        "simulate: {} point(s), {} window comparisons, {} within 3 SE of the spectral mean",
        points.len(),
        flags.len(),
        flags.iter().filter(|&&ok| ok).count()
    );
    Ok(())
}

fn render_simulation_svg(
    path: &Path,
    config: &ExperimentConfig,
    points: &[SimulatedPoint],
) -> Result<(), CmdError> {
    let mut series = Vec::new();
    if points.len() == 1 {
        let p = &points[0];
        let t = &p.stats.window_end_times;
        series.push(Series {
            label: "mean N",
            points: t.iter().cloned().zip(p.stats.mean_counts.clone()).collect(),
            errors: p.stats.se_mean.clone(),
            color: "#1f5fbf",
            dashed: false,
        });
        series.push(Series {
            label: "var N",
            points: t.iter().cloned().zip(p.stats.var_counts.clone()).collect(),
            errors: p.stats.se_var.clone(),
            color: "#bf3f1f",
            dashed: false,
        });
        series.push(Series {
            label: "LDT mean",
            points: t.iter().map(|&x| (x, p.ldt_mean_rate * x)).collect(),
            errors: vec![],
            color: "#1f5fbf",
            dashed: true,
        });
        series.push(Series {
            label: "LDT var",
            points: t.iter().map(|&x| (x, p.ldt_var_rate * x)).collect(),
            errors: vec![],
            color: "#bf3f1f",
            dashed: true,
        });
        write_plot(
            path,
            "Tick count statistics vs window",
            "window end time",
            "counts",
            &series,
        )?;
    } else {
        let last = config.windows.len() - 1;
        let t_last = config.windows[last];
        let xs: Vec<f64> = points.iter().filter_map(|p| p.sweep_value).collect();
        series.push(Series {
            label: "mean N",
            points: xs
                .iter()
                .cloned()
                .zip(points.iter().map(|p| p.stats.mean_counts[last]))
                .collect(),
            errors: points.iter().map(|p| p.stats.se_mean[last]).collect(),
            color: "#1f5fbf",
            dashed: false,
        });
        series.push(Series {
            label: "var N",
            points: xs
                .iter()
                .cloned()
                .zip(points.iter().map(|p| p.stats.var_counts[last]))
                .collect(),
            errors: points.iter().map(|p| p.stats.se_var[last]).collect(),
            color: "#bf3f1f",
            dashed: false,
        });
        series.push(Series {
            label: "LDT mean",
            points: xs
                .iter()
                .cloned()
                .zip(points.iter().map(|p| p.ldt_mean_rate * t_last))
                .collect(),
            errors: vec![],
            color: "#1f5fbf",
            dashed: true,
        });
        series.push(Series {
            label: "LDT var",
            points: xs
                .iter()
                .cloned()
                .zip(points.iter().map(|p| p.ldt_var_rate * t_last))
                .collect(),
            errors: vec![],
            color: "#bf3f1f",
            dashed: true,
        });
        let sweep_name = config
            .sweep
            .as_ref()
            .map(|s| s.parameter.clone())
            .unwrap_or_default();
        write_plot(
            path,
            &format!("Tick count statistics at t = {}", fmt_sig(t_last)),
            &sweep_name,
            "counts",
            &series,
        )?;
    }
    Ok(())
}

/// `validate`: runs the self-check suites; exit code 0 only if all pass.
pub fn cmd_validate(tol: Option<f64>, inject_bad_kraus: bool) -> i32 {
    let mut cfg = ValidationConfig::default();
    if let Some(t) = tol {
        cfg.gaussian_tol = t;
    }
    cfg.inject_invalid_kraus = inject_bad_kraus;
    let results = run_all(&cfg);
    let mut failures = Vec::new();
    for r in &results {
        println!(
            "{} {} — {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        if !r.passed {
            failures.push(json!({"suite": r.name, "detail": r.detail}));
        }
    }
    if failures.is_empty() {
        0
    } else {
        println!(
            "{}",
            serde_json::to_string(&json!({ "failures": failures })).expect("json serializes")
        );
        1
    }
}
