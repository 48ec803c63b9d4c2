// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: JSON schema, figure presets, merging and
//! hashing.
//!
//! A configuration is a single JSON document. A `preset` (from the file or
//! the command line) supplies every field first; the file and then the
//! command-line flags override field by field. The resolved configuration
//! is hashed (FNV-1a over its canonical serialization) and the hash is
//! echoed in every output file, so artifacts are traceable to their inputs.

use serde::{Deserialize, Serialize};
use tickwork_core::clockmodel::ClockModel;
use tickwork_core::trajectory::{InitialState, SimulationPlan};

#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    TwoLevelAthermal {
        omega: f64,
        gamma_m: f64,
        gamma_w: f64,
    },
    ThreeLevelAthermal {
        omega_m: f64,
        omega_c: f64,
        theta: f64,
        phi: f64,
        gamma_m: f64,
        gamma_c: f64,
        gamma_w: f64,
    },
    ThreeLevelHybrid {
        omega_m: f64,
        omega_c: f64,
        theta: f64,
        phi: f64,
        gamma_m: f64,
        gamma_c: f64,
        gamma_w: f64,
        gamma_h: f64,
        beta_h_omega_m: f64,
        beta_c_omega_c: f64,
    },
}

impl ModelConfig {
    pub fn to_model(&self) -> ClockModel {
        match *self {
            ModelConfig::TwoLevelAthermal {
                omega,
                gamma_m,
                gamma_w,
            } => ClockModel::TwoLevelAthermal {
                omega,
                gamma_m,
                gamma_w,
            },
            ModelConfig::ThreeLevelAthermal {
                omega_m,
                omega_c,
                theta,
                phi,
                gamma_m,
                gamma_c,
                gamma_w,
            } => ClockModel::ThreeLevelAthermal {
                omega_m,
                omega_c,
                theta,
                phi,
                gamma_m,
                gamma_c,
                gamma_w,
            },
            ModelConfig::ThreeLevelHybrid {
                omega_m,
                omega_c,
                theta,
                phi,
                gamma_m,
                gamma_c,
                gamma_w,
                gamma_h,
                beta_h_omega_m,
                beta_c_omega_c,
            } => ClockModel::ThreeLevelHybrid {
                omega_m,
                omega_c,
                theta,
                phi,
                gamma_m,
                gamma_c,
                gamma_w,
                gamma_h,
                beta_h_omega_m,
                beta_c_omega_c,
            },
        }
    }

    /// Parameter names a sweep may target for this model kind.
    pub fn sweepable_fields(&self) -> &'static [&'static str] {
        match self {
            ModelConfig::TwoLevelAthermal { .. } => &["omega", "gamma_m", "gamma_w"],
            ModelConfig::ThreeLevelAthermal { .. } => &[
                "omega_m", "omega_c", "theta", "phi", "gamma_m", "gamma_c", "gamma_w",
            ],
            ModelConfig::ThreeLevelHybrid { .. } => &[
                "omega_m",
                "omega_c",
                "theta",
                "phi",
                "gamma_m",
                "gamma_c",
                "gamma_w",
                "gamma_h",
                "beta_h_omega_m",
                "beta_c_omega_c",
            ],
        }
    }

    /// Returns a copy with the named parameter replaced.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self, ConfigError> {
        if !self.sweepable_fields().contains(&name) {
            return Err(ConfigError::Invalid(format!(
                "sweep parameter '{name}' is not a field of this model (expected one of {:?})",
                self.sweepable_fields()
            )));
        }
        let mut json = serde_json::to_value(self).expect("model serializes");
        json[name] = serde_json::json!(value);
        serde_json::from_value(json).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// "steady" or "ground".
    pub initial_state: String,
}

impl PlanConfig {
    pub fn to_plan(&self, seed: u64) -> Result<SimulationPlan, ConfigError> {
        let initial_state = match self.initial_state.as_str() {
            "steady" => InitialState::Steady,
            "ground" => InitialState::Ground,
            other => {
                return Err(ConfigError::Invalid(format!(
                    "initial_state must be \"steady\" or \"ground\", got \"{other}\""
                )))
            }
        };
        Ok(SimulationPlan {
            dt: self.dt,
            n_steps: self.n_steps,
            n_traj: self.n_traj,
            seed,
            initial_state,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SGridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for SGridConfig {
    fn default() -> Self {
        Self {
            min: -2.0,
            max: 2.0,
            points: 81,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
    #[serde(default)]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub preset: Option<String>,
    pub model: ModelConfig,
    pub plan: PlanConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    pub windows: Vec<f64>,
    #[serde(default)]
    pub s_grid: SGridConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model
            .to_model()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(ConfigError::Invalid("sweep has no values".into()));
            }
            // Every sweep point must itself be a valid model.
            for &v in &sweep.values {
                self.model
                    .with_parameter(&sweep.parameter, v)?
                    .to_model()
                    .validate()
                    .map_err(|e| {
                        ConfigError::Invalid(format!("sweep value {v} is invalid: {e}"))
                    })?;
            }
        }
        if self.windows.is_empty() {
            return Err(ConfigError::Invalid(
                "at least one count window is required".into(),
            ));
        }
        let horizon = self.plan.dt * self.plan.n_steps as f64;
        for &t in &self.windows {
            if !(t > 0.0 && t <= horizon * (1.0 + 1e-9)) {
                return Err(ConfigError::Invalid(format!(
                    "window {t} outside the simulated horizon {horizon}"
                )));
            }
        }
        if self.s_grid.points < 2 || self.s_grid.max <= self.s_grid.min {
            return Err(ConfigError::Invalid("s_grid needs points >= 2, max > min".into()));
        }
        Ok(())
    }

    /// FNV-1a hash of the canonical serialization.
    pub fn hash(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash
    }
}

/// Figure presets with every field populated from the production parameter
/// sets. The pre-sweep γ_m defaults to the mid-grid value each figure is
/// drawn around.
pub fn preset(name: &str) -> Result<serde_json::Value, ConfigError> {
    let json = match name {
        "fig2" => serde_json::json!({
            "preset": "fig2",
            "model": {"kind": "two_level_athermal", "omega": 1.0, "gamma_m": 1.5, "gamma_w": 6.0},
            "plan": {"dt": 1e-3, "n_steps": 1000, "n_traj": 5000, "seed": null, "initial_state": "steady"},
            "sweep": {"parameter": "gamma_m", "values": log_grid(0.1, 10.0, 17)},
            "windows": [0.25, 0.5, 0.75, 1.0],
            "s_grid": {"min": -2.0, "max": 2.0, "points": 81},
            "outputs": {}
        }),
        "fig3" => serde_json::json!({
            "preset": "fig3",
            "model": {"kind": "three_level_athermal", "omega_m": 1.0, "omega_c": 0.1,
                      "theta": std::f64::consts::FRAC_PI_2, "phi": 0.0,
                      "gamma_m": 3.0, "gamma_c": 4.0, "gamma_w": 3.0},
            "plan": {"dt": 1e-2, "n_steps": 1000, "n_traj": 5000, "seed": null, "initial_state": "steady"},
            "sweep": {"parameter": "gamma_m", "values": log_grid(0.1, 10.0, 17)},
            "windows": [2.5, 5.0, 7.5, 10.0],
            "s_grid": {"min": -2.0, "max": 2.0, "points": 81},
            "outputs": {}
        }),
        "fig4" => serde_json::json!({
            "preset": "fig4",
            "model": {"kind": "three_level_hybrid", "omega_m": 1.0, "omega_c": 0.1,
                      "theta": std::f64::consts::FRAC_PI_2, "phi": 0.0,
                      "gamma_m": 3.0, "gamma_c": 4.0, "gamma_w": 3.0,
                      "gamma_h": 4.0, "beta_h_omega_m": 3.0, "beta_c_omega_c": 100.0},
            "plan": {"dt": 1e-2, "n_steps": 1000, "n_traj": 5000, "seed": null, "initial_state": "ground"},
            "sweep": {"parameter": "gamma_m", "values": log_grid(0.1, 10.0, 17)},
            "windows": [2.5, 5.0, 7.5, 10.0],
            "s_grid": {"min": -2.0, "max": 2.0, "points": 81},
            "outputs": {}
        }),
        "fig6" => serde_json::json!({
            "preset": "fig6",
            "model": {"kind": "three_level_athermal", "omega_m": 1.0, "omega_c": 0.1,
                      "theta": std::f64::consts::FRAC_PI_2, "phi": 0.0,
                      "gamma_m": 3.0, "gamma_c": 4.0, "gamma_w": 3.0},
            "plan": {"dt": 1e-2, "n_steps": 1000, "n_traj": 1000, "seed": null, "initial_state": "steady"},
            "sweep": null,
            "windows": [2.5, 5.0, 7.5, 10.0],
            "s_grid": {"min": -2.0, "max": 2.0, "points": 81},
            "outputs": {}
        }),
        "fig7" => serde_json::json!({
            "preset": "fig7",
            "model": {"kind": "three_level_hybrid", "omega_m": 1.0, "omega_c": 0.1,
                      "theta": std::f64::consts::PI, "phi": 0.0,
                      "gamma_m": 3.0, "gamma_c": 4.0, "gamma_w": 3.0,
                      "gamma_h": 4.0, "beta_h_omega_m": 3.0, "beta_c_omega_c": 100.0},
            "plan": {"dt": 1e-2, "n_steps": 1000, "n_traj": 1000, "seed": null, "initial_state": "steady"},
            "sweep": null,
            "windows": [2.5, 5.0, 7.5, 10.0],
            "s_grid": {"min": -2.0, "max": 2.0, "points": 81},
            "outputs": {}
        }),
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown preset \"{other}\" (expected fig2|fig3|fig4|fig6|fig7)"
            )))
        }
    };
    Ok(json)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Parses `name=lo:hi:n` or `name=lo:hi:n:log` into a sweep.
pub fn parse_sweep_flag(flag: &str) -> Result<SweepConfig, ConfigError> {
    let (name, rest) = flag
        .split_once('=')
        .ok_or_else(|| ConfigError::Invalid(format!("sweep flag '{flag}' needs name=lo:hi:n")))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if !(parts.len() == 3 || parts.len() == 4) {
        return Err(ConfigError::Invalid(format!(
            "sweep flag '{flag}' needs lo:hi:n or lo:hi:n:log"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("bad sweep bound '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("bad sweep bound '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("bad sweep count '{}'", parts[2])))?;
    if n < 1 || hi < lo {
        return Err(ConfigError::Invalid(
            "sweep needs n >= 1 and hi >= lo".into(),
        ));
    }
    let values = if parts.len() == 4 {
        if parts[3] != "log" {
            return Err(ConfigError::Invalid(format!(
                "unknown sweep spacing '{}' (only 'log')",
                parts[3]
            )));
        }
        if lo <= 0.0 {
            return Err(ConfigError::Invalid("log sweep needs lo > 0".into()));
        }
        log_grid(lo, hi, n.max(2))
    } else if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    };
    Ok(SweepConfig {
        parameter: name.to_string(),
        values,
    })
}

/// Deep JSON merge: `over` wins field by field; objects merge recursively,
/// everything else (including arrays and null) replaces wholesale.
pub fn merge_json(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(base_map), serde_json::Value::Object(over_map)) => {
            for (k, v) in over_map {
                match base_map.get_mut(&k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        base_map.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Resolves the final configuration from an optional preset name, optional
/// config-file JSON, and command-line overrides.
pub fn resolve(
    preset_flag: Option<&str>,
    file_json: Option<serde_json::Value>,
    seed_flag: Option<u64>,
    sweep_flag: Option<&str>,
) -> Result<ExperimentConfig, ConfigError> {
    // Preset may come from the flag or from the file's own "preset" field.
    let preset_name = preset_flag.map(str::to_string).or_else(|| {
        file_json
            .as_ref()
            .and_then(|v| v.get("preset"))
            .and_then(|v| v.as_str())
            .map(str::to_string)
    });

    let mut resolved = match &preset_name {
        Some(name) => preset(name)?,
        None => serde_json::json!({}),
    };
    if let Some(file) = file_json {
        merge_json(&mut resolved, file);
    }

    let mut config: ExperimentConfig =
        serde_json::from_value(resolved).map_err(|e| ConfigError::Parse(e.to_string()))?;

    if let Some(flag) = sweep_flag {
        config.sweep = Some(parse_sweep_flag(flag)?);
    }
    if let Some(seed) = seed_flag {
        config.plan.seed = Some(seed);
    }
    if config.plan.seed.is_none() {
        if let Ok(env_seed) = std::env::var("TICKWORK_SEED") {
            let parsed = env_seed.parse::<u64>().map_err(|_| {
                ConfigError::Invalid(format!("TICKWORK_SEED must be a u64, got '{env_seed}'"))
            })?;
            config.plan.seed = Some(parsed);
        }
    }
    config.validate()?;
    Ok(config)
}

/// The seed actually used: explicit flag or config beats the environment,
/// which beats the built-in default.
pub fn effective_seed(config: &ExperimentConfig) -> u64 {
    config.plan.seed.unwrap_or(0x71c4_0c1e)
}
