// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Count-statistics estimators over simulated ensembles.
//!
//! Windowed count means and variances with standard errors, Mandel Q
//! estimates, and the pooled per-step tick moments that the steady-state
//! ensembles are checked against.

use thiserror::Error;

use crate::trajectory::EnsembleResult;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("window t={0} lies outside the simulated horizon {1}")]
    WindowOutOfHorizon(f64, f64),
    #[error("mean count is zero in window {0}; Mandel Q undefined")]
    ZeroMeanCount(usize),
}

/// Windowed count statistics across an ensemble.
///
/// `mean_counts[i]` and `var_counts[i]` are the sample mean and unbiased
/// sample variance of N at `window_end_times[i]` over trajectories, with
/// standard errors. SE(var) uses the fourth-central-moment normal
/// approximation, Var(s²) ≈ (m₄ − s⁴(n−3)/(n−1))/n, which is crude for
/// small ensembles.
#[derive(Debug, Clone)]
pub struct CountWindowStats {
    pub window_end_times: Vec<f64>,
    pub mean_counts: Vec<f64>,
    pub var_counts: Vec<f64>,
    pub se_mean: Vec<f64>,
    pub se_var: Vec<f64>,
    pub n_traj: usize,
}

/// Windowed mean/variance of the tick count over the ensemble.
pub fn count_stats(
    ensemble: &EnsembleResult,
    windows: &[f64],
) -> Result<CountWindowStats, StatsError> {
    if ensemble.records.is_empty() {
        return Err(StatsError::EmptyEnsemble);
    }
    let horizon = ensemble.dt * ensemble.n_steps as f64;
    for &t in windows {
        if t <= 0.0 || t > horizon * (1.0 + 1e-9) {
            return Err(StatsError::WindowOutOfHorizon(t, horizon));
        }
    }
    let n = ensemble.records.len();
    let mut out = CountWindowStats {
        window_end_times: windows.to_vec(),
        mean_counts: Vec::with_capacity(windows.len()),
        var_counts: Vec::with_capacity(windows.len()),
        se_mean: Vec::with_capacity(windows.len()),
        se_var: Vec::with_capacity(windows.len()),
        n_traj: n,
    };
    for &t in windows {
        let counts: Vec<f64> = ensemble
            .records
            .iter()
            .map(|r| r.count_at_time(t) as f64)
            .collect();
        let (mean, var, m4) = moments(&counts);
        out.mean_counts.push(mean);
        out.var_counts.push(var);
        out.se_mean.push((var / n as f64).sqrt());
        let var_of_var = ((m4 - var * var * (n as f64 - 3.0) / (n as f64 - 1.0)) / n as f64)
            .max(0.0);
        out.se_var.push(var_of_var.sqrt());
    }
    Ok(out)
}

fn moments(samples: &[f64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &x in samples {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let var = if samples.len() > 1 { m2 / (n - 1.0) } else { 0.0 };
    (mean, var, m4 / n)
}

/// Mandel Q estimate for one window: q̂ = var/mean − 1 with a delta-method
/// standard error that ignores the mean–variance covariance.
pub fn mandel_q_estimate(
    stats: &CountWindowStats,
    window_index: usize,
) -> Result<(f64, f64), StatsError> {
    let mean = stats.mean_counts[window_index];
    if mean <= 0.0 {
        return Err(StatsError::ZeroMeanCount(window_index));
    }
    let var = stats.var_counts[window_index];
    let q = var / mean - 1.0;
    let se = ((stats.se_var[window_index] / mean).powi(2)
        + (var * stats.se_mean[window_index] / (mean * mean)).powi(2))
    .sqrt();
    Ok((q, se))
}

/// Pooled per-step tick moments against the stationary prediction ε_w·P.
///
/// Standard errors come from the spread of per-trajectory statistics
/// (batch means), which absorbs the within-trajectory correlation of dN.
#[derive(Debug, Clone, Copy)]
pub struct PerStepMoments {
    pub mean_dn: f64,
    pub var_dn: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub expected: f64,
    pub mean_within_3se: bool,
    pub var_within_3se: bool,
}

/// Pooled per-step mean and variance of dN over the whole ensemble,
/// compared with ε_w·P at three standard errors.
pub fn per_step_moments(
    ensemble: &EnsembleResult,
    steady_population: f64,
    epsilon_w: f64,
) -> Result<PerStepMoments, StatsError> {
    if ensemble.records.is_empty() {
        return Err(StatsError::EmptyEnsemble);
    }
    let steps = ensemble.n_steps as f64;
    let per_traj_mean: Vec<f64> = ensemble
        .records
        .iter()
        .map(|r| r.ticks.len() as f64 / steps)
        .collect();
    // dN ∈ {0,1} with dN² = dN, so the per-trajectory sample variance is
    // p̂(1−p̂)·n/(n−1).
    let per_traj_var: Vec<f64> = per_traj_mean
        .iter()
        .map(|&p| p * (1.0 - p) * steps / (steps - 1.0))
        .collect();

    let (mean_dn, mean_spread, _) = moments(&per_traj_mean);
    let (var_dn, var_spread, _) = moments(&per_traj_var);
    let n = ensemble.records.len() as f64;
    let se_mean = (mean_spread / n).sqrt();
    let se_var = (var_spread / n).sqrt();
    let expected = epsilon_w * steady_population;
    Ok(PerStepMoments {
        mean_dn,
        var_dn,
        se_mean,
        se_var,
        expected,
        mean_within_3se: (mean_dn - expected).abs() <= 3.0 * se_mean,
        var_within_3se: (var_dn - expected).abs() <= 3.0 * se_var,
    })
}
