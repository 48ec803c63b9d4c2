// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Large-deviation predictions for the tick statistics.
//!
//! The scaled cumulant generating function (SCGF) of the tick count is the
//! largest real eigenvalue Θ(s) of the tilted generator 𝒲(s). Its
//! derivatives at s = 0 give the asymptotic count moments,
//! ⟨N⟩ = −Θ′(0)·t and var(N) = Θ″(0)·t, from which the Mandel Q parameter,
//! relative timing error and clockwork power follow. Closed-form steady
//! states are provided where they exist and serve as independent oracles
//! for the spectral route.

use rayon::prelude::*;
use thiserror::Error;

use crate::clockmodel::{tilted_generator, ClockModel};
use crate::numkernel::{
    rightmost_eigenvalue, steady_null_vector, DensityMatrix, NumericsConfig, NumericsError,
};

/// Base central-difference step for Θ′(0), Θ″(0). The dense eigensolver
/// resolves Θ to ~1e−14·‖W‖, so a small step drowns the second difference
/// in that noise; a larger step with Richardson extrapolation keeps both
/// truncation and noise near 1e−10.
const DERIVATIVE_STEP: f64 = 1e-2;

/// Largest |s| the spectral route is exercised at.
pub const MAX_TILT: f64 = 5.0;

#[derive(Debug, Error)]
pub enum LdtError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("clock does not tick (gamma_tick = {0})")]
    ZeroTickRate(f64),
    #[error("SCGF came out complex at s={s}: imaginary part {imag:.3e}")]
    ComplexScgf { s: f64, imag: f64 },
    #[error("tilt s={0} outside the supported range |s| <= {MAX_TILT}")]
    TiltOutOfRange(f64),
    #[error("no closed form for this model/angle; use the numeric steady state")]
    NoClosedForm,
    #[error("clockwork population P_c = {0} too small for a population ratio")]
    EmptyClockworkLevel(f64),
    #[error("operation requires a three-level model")]
    RequiresThreeLevel,
}

/// Steady state of the untilted generator.
pub fn steady_state(model: &ClockModel) -> Result<DensityMatrix, LdtError> {
    let w = tilted_generator(model, 0.0);
    Ok(steady_null_vector(&w, &NumericsConfig::default())?)
}

/// Θ(s): largest real eigenvalue of 𝒲(s).
///
/// For counting generators this eigenvalue is real; a complex result is
/// reported as an error rather than silently truncated.
pub fn scgf(model: &ClockModel, s: f64) -> Result<f64, LdtError> {
    if !s.is_finite() || s.abs() > MAX_TILT {
        return Err(LdtError::TiltOutOfRange(s));
    }
    let w = tilted_generator(model, s);
    let top = rightmost_eigenvalue(&w)?;
    if top.im.abs() > 1e-9 {
        return Err(LdtError::ComplexScgf { s, imag: top.im });
    }
    Ok(top.re)
}

/// Closed-form two-level SCGF,
/// Θ(s) = e^{−s}/2·[√(e^s(e^s(16γ_m²+γ_w²)+8γ_mγ_w)) − e^s(4γ_m+γ_w)].
pub fn analytic_scgf_two_level(gamma_m: f64, gamma_w: f64, s: f64) -> f64 {
    let es = s.exp();
    let radicand = es * (es * (16.0 * gamma_m * gamma_m + gamma_w * gamma_w)
        + 8.0 * gamma_m * gamma_w);
    ((-s).exp() / 2.0) * (radicand.sqrt() - es * (4.0 * gamma_m + gamma_w))
}

/// Sampled SCGF curve on a grid of counting-field values.
#[derive(Debug, Clone)]
pub struct LdtCurve {
    pub s_values: Vec<f64>,
    pub scgf_values: Vec<f64>,
}

impl LdtCurve {
    /// Evaluates Θ on a uniform grid. Each point is an independent full
    /// eigensolve (no continuation), computed in parallel and assembled in
    /// grid order.
    pub fn sample(model: &ClockModel, s_min: f64, s_max: f64, points: usize) -> Result<Self, LdtError> {
        assert!(points >= 2 && s_max > s_min);
        let s_values: Vec<f64> = (0..points)
            .map(|k| s_min + (s_max - s_min) * k as f64 / (points - 1) as f64)
            .collect();
        let scgf_values = s_values
            .par_iter()
            .map(|&s| scgf(model, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            s_values,
            scgf_values,
        })
    }
}

/// Asymptotic mean and variance of the tick count after time `t`, from
/// central differences of Θ at s = 0.
pub fn count_moments(model: &ClockModel, t: f64) -> Result<(f64, f64), LdtError> {
    let (d1, d2) = scgf_derivatives(model)?;
    Ok((-d1 * t, d2 * t))
}

/// (Θ′(0), Θ″(0)) by central differences around s = 0.
///
/// Five eigensolves at 0, ±h/2, ±h with a base step of 1e−2: a 5-point
/// stencil for Θ′ and a Richardson-extrapolated 3-point second difference
/// for Θ″, both O(h⁴). Validated against the two-level closed forms to
/// ~1e−10 across the acceptance parameter grids.
pub fn scgf_derivatives(model: &ClockModel) -> Result<(f64, f64), LdtError> {
    let h = DERIVATIVE_STEP;
    let zero = scgf(model, 0.0)?;
    let plus_half = scgf(model, h / 2.0)?;
    let minus_half = scgf(model, -h / 2.0)?;
    let plus = scgf(model, h)?;
    let minus = scgf(model, -h)?;

    let d1 = (minus - 8.0 * minus_half + 8.0 * plus_half - plus) / (6.0 * h);
    let d2_coarse = (plus - 2.0 * zero + minus) / (h * h);
    let d2_fine = (plus_half - 2.0 * zero + minus_half) / (h * h / 4.0);
    let d2 = (4.0 * d2_fine - d2_coarse) / 3.0;
    Ok((d1, d2))
}

/// Asymptotic tick rate γ_tick = −Θ′(0).
pub fn tick_rate(model: &ClockModel) -> Result<f64, LdtError> {
    Ok(-scgf_derivatives(model)?.0)
}

/// Mandel Q parameter of the asymptotic count distribution,
/// Q = −Θ″(0)/Θ′(0) − 1; negative values are sub-Poissonian.
pub fn mandel_q(model: &ClockModel) -> Result<f64, LdtError> {
    let (d1, d2) = scgf_derivatives(model)?;
    let rate = -d1;
    if rate <= 1e-12 {
        return Err(LdtError::ZeroTickRate(rate));
    }
    Ok(d2 / rate - 1.0)
}

/// Closed-form two-level Mandel Q, −4γ_mγ_w/(4γ_m+γ_w)².
pub fn analytic_mandel_q_two_level(gamma_m: f64, gamma_w: f64) -> f64 {
    let denom = 4.0 * gamma_m + gamma_w;
    -4.0 * gamma_m * gamma_w / (denom * denom)
}

/// Closed-form two-level excited-state population, 2γ_m/(4γ_m+γ_w).
pub fn analytic_excited_population_two_level(gamma_m: f64, gamma_w: f64) -> f64 {
    2.0 * gamma_m / (4.0 * gamma_m + gamma_w)
}

/// Relative error √(1+Q)/√(γ_tick·t_w) in estimating a working duration t_w.
pub fn relative_error(model: &ClockModel, t_w: f64) -> Result<f64, LdtError> {
    assert!(t_w > 0.0, "working duration must be positive");
    let (d1, d2) = scgf_derivatives(model)?;
    let rate = -d1;
    if rate <= 1e-12 {
        return Err(LdtError::ZeroTickRate(rate));
    }
    let q = d2 / rate - 1.0;
    Ok(((1.0 + q) / (rate * t_w)).sqrt())
}

/// Energy converted into clockwork per unit time, J_w = γ_tick·Ω_w.
/// Three-level models only.
pub fn clockwork_power(model: &ClockModel) -> Result<f64, LdtError> {
    if model.dim() != 3 {
        return Err(LdtError::RequiresThreeLevel);
    }
    Ok(tick_rate(model)? * model.omega_w())
}

/// Closed-form steady-state quantities, where printed forms exist.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormPopulations {
    pub p_m: f64,
    /// Population of |c⟩; available for the athermal clock at any θ and for
    /// the hybrid clock at θ = π (through the population ratio).
    pub p_c: Option<f64>,
    /// |ρ_mg|², ∝ sin²(2θ); athermal clock only.
    pub coherence_mg_sq: Option<f64>,
}

/// Evaluates the closed-form steady-state populations at measurement angle
/// `theta` (overriding the model's own angle).
///
/// Coverage: athermal three-level at any θ; hybrid at θ ∈ {π/2, π} exactly.
/// Everything else must go through [`steady_state`].
pub fn closed_form_populations(
    model: &ClockModel,
    theta: f64,
) -> Result<ClosedFormPopulations, LdtError> {
    match *model {
        ClockModel::TwoLevelAthermal { .. } => Err(LdtError::NoClosedForm),
        ClockModel::ThreeLevelAthermal {
            omega_m,
            gamma_m,
            gamma_c,
            gamma_w,
            ..
        } => {
            let (gm, gc, gw, om2) = (gamma_m, gamma_c, gamma_w, omega_m * omega_m);
            let sin2 = theta.sin() * theta.sin();
            let cos2t = (2.0 * theta).cos();
            let sin2t = (2.0 * theta).sin();

            let shared = gw * (gc + gm) + 6.0 * gc * gm;
            let denом_const = 4.0 * om2 * (gw * (gc + gm) + 2.0 * gc * gm)
                + gw * (8.0 * gm + gw) * shared;
            let denom_cos = gm
                * (gw * (2.0 * gc - gw) * (8.0 * gm + gw) - 4.0 * om2 * (2.0 * gc + gw));
            let denom = denom_cos * cos2t + denом_const;

            let band = 8.0 * gm * gw + gw * gw + 4.0 * om2;
            let p_m = 2.0 * gc * gm * sin2 * band / denom;
            let p_c = 2.0 * gw * gm * sin2 * band / denom;

            let coh_num = 4.0 * gc * gc * gm * gm * gw * gw
                * sin2t
                * sin2t
                * ((8.0 * gm + gw) * (8.0 * gm + gw) + 4.0 * om2);
            let coherence = coh_num / (denom * denom);

            Ok(ClosedFormPopulations {
                p_m,
                p_c: Some(p_c),
                coherence_mg_sq: Some(coherence),
            })
        }
        ClockModel::ThreeLevelHybrid {
            gamma_m,
            gamma_c,
            gamma_w,
            gamma_h,
            beta_h_omega_m,
            beta_c_omega_c,
            ..
        } => {
            let (gm, gc, gw, gh) = (gamma_m, gamma_c, gamma_w, gamma_h);
            let eh = beta_h_omega_m.exp();
            let tol = 1e-12;
            if (theta - std::f64::consts::FRAC_PI_2).abs() < tol {
                // Common factor e^{β_cΩ_c} divided out of numerator and
                // denominator to stay finite for near-zero-temperature baths.
                let num = gc * (2.0 * gm * eh + gh);
                let den = eh * (2.0 * gm * (2.0 * gc + gw) + gc * (gh + gw))
                    + gh * (gc + gw)
                    + gc * eh * (2.0 * gm + gh + gw) * (-beta_c_omega_c).exp();
                Ok(ClosedFormPopulations {
                    p_m: num / den,
                    p_c: None,
                    coherence_mg_sq: Some(0.0),
                })
            } else if (theta - std::f64::consts::PI).abs() < tol {
                let num = gc * gh;
                let den = gc * (gh + gw) * eh
                    + gh * (gc + gw)
                    + gc * eh * (gh + gw) * (-beta_c_omega_c).exp();
                let p_m = num / den;
                let ratio = clockwork_ratio_hybrid_pi(gc, gw, gh, beta_h_omega_m, beta_c_omega_c);
                Ok(ClosedFormPopulations {
                    p_m,
                    p_c: Some(p_m / ratio),
                    coherence_mg_sq: Some(0.0),
                })
            } else {
                Err(LdtError::NoClosedForm)
            }
        }
    }
}

/// Closed-form hybrid population ratio P_m/P_c = e^{−β_wΩ_w} at θ = π.
pub fn clockwork_ratio_hybrid_pi(
    gamma_c: f64,
    gamma_w: f64,
    gamma_h: f64,
    beta_h_omega_m: f64,
    beta_c_omega_c: f64,
) -> f64 {
    // Numerator and denominator share a factor e^{β_cΩ_c}.
    let eh = beta_h_omega_m.exp();
    gamma_c * gamma_h
        / (gamma_h * gamma_w + gamma_c * eh * (gamma_h + gamma_w) * (-beta_c_omega_c).exp())
}

/// Steady population ratio P_m/P_c = e^{−β_wΩ_w} of the clockwork levels,
/// the Boltzmann factor of the effective clockwork temperature. Equals
/// γ_c/γ_w exactly for the athermal clock at θ = π/2.
pub fn clockwork_population_ratio(model: &ClockModel) -> Result<f64, LdtError> {
    if model.dim() != 3 {
        return Err(LdtError::RequiresThreeLevel);
    }
    let rho = steady_state(model)?;
    let p_c = rho.population(1);
    if p_c < 1e-14 {
        return Err(LdtError::EmptyClockworkLevel(p_c));
    }
    Ok(rho.population(0) / p_c)
}

/// Full derived-prediction bundle for one model.
#[derive(Debug, Clone)]
pub struct LdtSummary {
    pub steady: DensityMatrix,
    /// Populations in basis order (|e⟩,|g⟩) or (|m⟩,|c⟩,|g⟩).
    pub populations: Vec<f64>,
    /// |ρ_mg|² (three-level) or |ρ_eg|² (two-level).
    pub coherence_mg_sq: f64,
    pub gamma_tick: f64,
    pub mandel_q: f64,
    /// J_w = γ_tick·Ω_w; zero splitting means zero power.
    pub clockwork_power: f64,
    /// P_m/P_c where defined (three-level with P_c > 0).
    pub clockwork_pop_ratio: Option<f64>,
}

/// Computes every derived prediction in one pass.
pub fn summarize(model: &ClockModel) -> Result<LdtSummary, LdtError> {
    let steady = steady_state(model)?;
    let dim = steady.dim();
    let populations: Vec<f64> = (0..dim).map(|i| steady.population(i)).collect();
    let coherence_mg_sq = steady.coherence(0, dim - 1).norm_sqr();
    let (d1, d2) = scgf_derivatives(model)?;
    let gamma_tick = -d1;
    let mandel_q = if gamma_tick > 1e-12 {
        d2 / gamma_tick - 1.0
    } else {
        0.0
    };
    let clockwork_pop_ratio = if dim == 3 && populations[1] > 1e-14 {
        Some(populations[0] / populations[1])
    } else {
        None
    };
    Ok(LdtSummary {
        steady,
        populations,
        coherence_mg_sq,
        gamma_tick,
        mandel_q,
        clockwork_power: gamma_tick * model.omega_w(),
        clockwork_pop_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(gamma_m: f64, gamma_w: f64) -> ClockModel {
        ClockModel::TwoLevelAthermal {
            omega: 1.0,
            gamma_m,
            gamma_w,
        }
    }

    fn three_level(theta: f64, gamma_m: f64, gamma_c: f64, gamma_w: f64) -> ClockModel {
        ClockModel::ThreeLevelAthermal {
            omega_m: 1.0,
            omega_c: 0.1,
            theta,
            phi: 0.0,
            gamma_m,
            gamma_c,
            gamma_w,
        }
    }

    fn hybrid(theta: f64, gamma_h: f64) -> ClockModel {
        ClockModel::ThreeLevelHybrid {
            omega_m: 1.0,
            omega_c: 0.1,
            theta,
            phi: 0.0,
            gamma_m: 3.0,
            gamma_c: 4.0,
            gamma_w: 3.0,
            gamma_h,
            beta_h_omega_m: 3.0,
            beta_c_omega_c: 100.0,
        }
    }

    const PI: f64 = std::f64::consts::PI;
    const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

    #[test]
    fn steady_state_two_level_closed_form() {
        let rho = steady_state(&two_level(1.0, 6.0)).unwrap();
        assert!((rho.population(0) - analytic_excited_population_two_level(1.0, 6.0)).abs() < 1e-12);
    }

    #[test]
    fn steady_state_three_level_theta_zero_is_ground() {
        // X̂ commutes with Ĥ at θ=0: nothing pumps, everything decays to |g⟩.
        let rho = steady_state(&three_level(0.0, 3.0, 4.0, 3.0)).unwrap();
        assert!((rho.population(2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn steady_state_without_pump_is_ground() {
        let rho = steady_state(&two_level(0.0, 6.0)).unwrap();
        assert!((rho.population(1) - 1.0).abs() < 1e-12);
        assert!(rho.population(0).abs() < 1e-12);
    }

    #[test]
    fn steady_state_three_level_closed_form_at_half_pi() {
        let rho = steady_state(&three_level(HALF_PI, 3.0, 4.0, 3.0)).unwrap();
        assert!((rho.population(0) - 24.0 / 78.0).abs() < 1e-12);
        assert!((rho.population(1) - 18.0 / 78.0).abs() < 1e-12);
    }

    #[test]
    fn scgf_vanishes_at_zero_tilt() {
        for model in [
            two_level(1.5, 6.0),
            three_level(HALF_PI, 3.0, 4.0, 3.0),
            hybrid(HALF_PI, 4.0),
        ] {
            assert!(scgf(&model, 0.0).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn scgf_two_level_matches_analytic_on_grid() {
        let model = two_level(1.0, 6.0);
        let curve = LdtCurve::sample(&model, -2.0, 2.0, 81).unwrap();
        for (s, theta) in curve.s_values.iter().zip(&curve.scgf_values) {
            let exact = analytic_scgf_two_level(1.0, 6.0, *s);
            assert!((theta - exact).abs() <= 1e-9, "s={s}: {theta} vs {exact}");
        }
    }

    #[test]
    fn analytic_scgf_is_zero_at_origin_algebraically() {
        for (gm, gw) in [(0.5, 6.0), (1.0, 6.0), (2.0, 3.0)] {
            assert!(analytic_scgf_two_level(gm, gw, 0.0).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_scgf_slope_matches_tick_rate() {
        let (gm, gw) = (1.0, 6.0);
        let h = 1e-6;
        let d1 = (analytic_scgf_two_level(gm, gw, h) - analytic_scgf_two_level(gm, gw, -h))
            / (2.0 * h);
        let expected = 2.0 * gm * gw / (4.0 * gm + gw);
        assert!((-d1 - expected).abs() < 1e-8);
    }

    #[test]
    fn scgf_monotone_nonincreasing_and_plateaus() {
        let model = three_level(HALF_PI, 3.0, 4.0, 3.0);
        let curve = LdtCurve::sample(&model, 0.0, 5.0, 41).unwrap();
        for pair in curve.scgf_values.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
        // Finite plateau: even at s=5 the SCGF stays above the total decay scale.
        assert!(curve.scgf_values[40] > -(3.0 + 4.0 + 3.0 + 3.0));
    }

    #[test]
    fn count_moments_examples() {
        let (mean, _) = count_moments(&two_level(1.5, 6.0), 1.0).unwrap();
        assert!((mean - 1.5).abs() < 1e-9);

        let (mean, var) = count_moments(&two_level(1.0, 6.0), 1.0).unwrap();
        assert!((mean - 1.2).abs() < 1e-9);
        assert!((var - 0.912).abs() < 1e-9);

        let (mean3, _) = count_moments(&three_level(HALF_PI, 3.0, 4.0, 3.0), 10.0).unwrap();
        assert!((mean3 - 10.0 * 72.0 / 78.0).abs() < 1e-6);
    }

    #[test]
    fn mandel_q_closed_forms() {
        assert!((mandel_q(&two_level(1.5, 6.0)).unwrap() + 0.25).abs() < 1e-9);
        assert!((mandel_q(&two_level(1.0, 6.0)).unwrap() + 0.24).abs() < 1e-9);
        // Poissonian limit as the pump vanishes. The analytic formula goes
        // to zero linearly in γ_m; the numeric route follows at a rate where
        // the derivative noise is not amplified by the tiny tick rate.
        assert!(analytic_mandel_q_two_level(1e-12, 6.0).abs() < 1e-11);
        assert!(mandel_q(&two_level(1e-4, 6.0)).unwrap().abs() < 1e-3);
        // No ticks at all is an error.
        assert!(matches!(
            mandel_q(&two_level(0.0, 6.0)),
            Err(LdtError::ZeroTickRate(_))
        ));
    }

    #[test]
    fn two_level_q_bounded_below_by_quarter() {
        for gm in [0.3, 0.7, 1.5, 3.0] {
            for gw in [0.5, 2.0, 4.0 * gm, 9.0] {
                let q = analytic_mandel_q_two_level(gm, gw);
                assert!(q >= -0.25 - 1e-12);
                if (gw - 4.0 * gm).abs() < 1e-9 {
                    assert!((q + 0.25).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn relative_error_examples() {
        // Q=−0.25, γ_tick=1.5, t_w=100 → √(0.75/150).
        let model = two_level(1.5, 6.0);
        let err = relative_error(&model, 100.0).unwrap();
        assert!((err - (0.75f64 / 150.0).sqrt()).abs() < 1e-7);
        // Quadrupling the duration halves the error.
        let err4 = relative_error(&model, 400.0).unwrap();
        assert!((err4 - err / 2.0).abs() < 1e-9);
        // A Poissonian clock with the same rate is always worse.
        let poisson = 1.0 / (1.5f64 * 100.0).sqrt();
        assert!(err < poisson);
    }

    #[test]
    fn clockwork_power_examples() {
        let p = clockwork_power(&three_level(HALF_PI, 3.0, 4.0, 3.0)).unwrap();
        assert!((p - (72.0 / 78.0) * 0.9).abs() < 1e-6);
        assert!(clockwork_power(&three_level(HALF_PI, 0.0, 4.0, 3.0)).unwrap() < 1e-9);
        assert!(clockwork_power(&two_level(1.0, 6.0)).is_err());
    }

    #[test]
    fn closed_form_populations_athermal() {
        let model = three_level(HALF_PI, 3.0, 4.0, 3.0);
        let cf = closed_form_populations(&model, HALF_PI).unwrap();
        assert!((cf.p_m - 24.0 / 78.0).abs() < 1e-15);
        assert!((cf.p_c.unwrap() - 18.0 / 78.0).abs() < 1e-15);
        assert!(cf.coherence_mg_sq.unwrap().abs() < 1e-30);

        let cf0 = closed_form_populations(&model, 0.0).unwrap();
        assert!(cf0.p_m.abs() < 1e-15);
        assert!(cf0.p_c.unwrap().abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_numeric_on_theta_grid() {
        for i in 0..13 {
            let theta = PI * i as f64 / 12.0;
            let model = three_level(theta, 3.0, 4.0, 3.0);
            let cf = closed_form_populations(&model, theta).unwrap();
            let rho = steady_state(&model).unwrap();
            assert!(
                (cf.p_m - rho.population(0)).abs() < 1e-9,
                "theta={theta}: {} vs {}",
                cf.p_m,
                rho.population(0)
            );
            assert!((cf.p_c.unwrap() - rho.population(1)).abs() < 1e-9);
            let coh = rho.coherence(0, 2).norm_sqr();
            assert!(
                (cf.coherence_mg_sq.unwrap() - coh).abs() < 1e-9,
                "theta={theta}: coherence {} vs {}",
                cf.coherence_mg_sq.unwrap(),
                coh
            );
        }
    }

    #[test]
    fn coherence_mirror_symmetry_and_zeros() {
        let model = three_level(HALF_PI, 3.0, 4.0, 3.0);
        for theta in [0.0, HALF_PI, PI] {
            let rho = steady_state(&three_level(theta.max(1e-300), 3.0, 4.0, 3.0)).unwrap();
            let _ = model.clone();
            assert!(rho.coherence(0, 2).norm_sqr() <= 1e-12, "theta={theta}");
        }
        for i in 1..6 {
            let theta = PI * i as f64 / 12.0;
            let a = closed_form_populations(&three_level(theta, 3.0, 4.0, 3.0), theta)
                .unwrap()
                .coherence_mg_sq
                .unwrap();
            let b = closed_form_populations(&three_level(PI - theta, 3.0, 4.0, 3.0), PI - theta)
                .unwrap()
                .coherence_mg_sq
                .unwrap();
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn tick_rate_maximal_at_half_pi() {
        let mut best = (0.0, -1.0);
        for i in 0..13 {
            let theta = PI * i as f64 / 12.0;
            let model = three_level(theta, 3.0, 4.0, 3.0);
            let rate = tick_rate(&model).unwrap();
            if rate > best.1 {
                best = (theta, rate);
            }
        }
        assert!((best.0 - HALF_PI).abs() < 1e-12, "max at theta={}", best.0);
    }

    #[test]
    fn hybrid_closed_forms_match_numeric() {
        for theta in [HALF_PI, PI] {
            let model = hybrid(theta, 4.0);
            let cf = closed_form_populations(&model, theta).unwrap();
            let rho = steady_state(&model).unwrap();
            assert!(
                (cf.p_m - rho.population(0)).abs() < 1e-9,
                "theta={theta}: {} vs {}",
                cf.p_m,
                rho.population(0)
            );
        }
        // Ratio at θ=π.
        let ratio = clockwork_ratio_hybrid_pi(4.0, 3.0, 4.0, 3.0, 100.0);
        let numeric = clockwork_population_ratio(&hybrid(PI, 4.0)).unwrap();
        assert!((ratio - numeric).abs() < 1e-9);
        // No closed form away from the printed angles.
        assert!(matches!(
            closed_form_populations(&hybrid(1.0, 4.0), 1.0),
            Err(LdtError::NoClosedForm)
        ));
        // Hot coupling off kills the θ=π clock.
        let dead = closed_form_populations(&hybrid(PI, 0.0), PI).unwrap();
        assert!(dead.p_m.abs() < 1e-15);
    }

    #[test]
    fn athermal_population_ratio_is_rate_ratio() {
        let ratio = clockwork_population_ratio(&three_level(HALF_PI, 3.0, 4.0, 3.0)).unwrap();
        assert!((ratio - 4.0 / 3.0).abs() < 1e-12);
        let balanced = clockwork_population_ratio(&three_level(HALF_PI, 3.0, 3.0, 3.0)).unwrap();
        assert!((balanced - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sub_poissonian_on_acceptance_grids() {
        for gm in [0.5, 1.5, 3.0] {
            assert!(mandel_q(&two_level(gm, 6.0)).unwrap() < 0.0);
        }
        for gm in [1.0, 3.0, 6.0] {
            let model = three_level(HALF_PI, gm, 4.0, 3.0);
            assert!(mandel_q(&model).unwrap() < 0.0);
        }
        assert!(mandel_q(&hybrid(HALF_PI, 4.0)).unwrap() < 0.0);
    }

    #[test]
    fn pipelines_agree_on_tick_rate() {
        // −Θ′(0) = P·γ_w through two independent routes.
        for model in [
            two_level(1.5, 6.0),
            three_level(1.1, 3.0, 4.0, 3.0),
            hybrid(HALF_PI, 4.0),
        ] {
            let rate = tick_rate(&model).unwrap();
            let rho = steady_state(&model).unwrap();
            let from_population = rho.population(0) * model.gamma_w();
            assert!(
                (rate - from_population).abs() <= 1e-8,
                "{model:?}: {rate} vs {from_population}"
            );
        }
    }

    #[test]
    fn summarize_collects_consistent_fields() {
        let model = three_level(HALF_PI, 3.0, 4.0, 3.0);
        let summary = summarize(&model).unwrap();
        assert!((summary.populations.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((summary.gamma_tick - summary.populations[0] * 3.0).abs() < 1e-8);
        assert!(summary.mandel_q < 0.0);
        assert!((summary.clockwork_pop_ratio.unwrap() - 4.0 / 3.0).abs() < 1e-9);
        assert!((summary.clockwork_power - summary.gamma_tick * 0.9).abs() < 1e-12);
    }

    #[test]
    fn scgf_rejects_out_of_range_tilt() {
        assert!(matches!(
            scgf(&two_level(1.0, 6.0), 7.0),
            Err(LdtError::TiltOutOfRange(_))
        ));
    }
}
