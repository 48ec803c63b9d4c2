// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Clock parameter bundles and the operators built from them.
//!
//! Basis conventions are fixed so that operator matrices can be written
//! down literally: two-level systems use {|e⟩, |g⟩} (indices 0, 1), the
//! three-level clock uses {|m⟩, |c⟩, |g⟩} (indices 0, 1, 2). ħ = k_B = 1
//! throughout, so thermal couplings enter as dimensionless products βΩ.
//!
//! The weak spin measurement is described by the Gaussian operator family
//! M(r) = (4ε_m/π)^{1/4} · exp[−2ε_m (r − X̂)²] with ε_m = γ_m·dt (see
//! Jacobs & Steck, Contemp. Phys. 47, 279 (2006)); fluorescence jumps use
//! discrete two-outcome Kraus pairs, and thermal couplings follow the
//! standard weak-coupling dissipators (Breuer & Petruccione, ch. 3).

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::numkernel::{superop_term, ComplexMatrix, Superoperator};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("Kraus event weight must satisfy 0 <= epsilon < 1, got {0}")]
    EpsilonOutOfRange(f64),
    #[error("operation requires a three-level model")]
    RequiresThreeLevel,
    #[error("channel {channel} is not defined for dimension {dim}")]
    ChannelDimension { channel: &'static str, dim: usize },
}

/// Parameter bundle for one clock realization.
///
/// Rates and frequencies are in units of a reference energy; angles in
/// radians. `beta_h_omega_m` and `beta_c_omega_c` are the dimensionless
/// products β_hΩ_m and β_cΩ_c of the hybrid clock's reservoirs.
#[derive(Debug, Clone, PartialEq)]
pub enum ClockModel {
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

impl ClockModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |msg: String| Err(ModelError::InvalidParameter(msg));
        match *self {
            ClockModel::TwoLevelAthermal {
                omega,
                gamma_m,
                gamma_w,
            } => {
                if !(omega.is_finite() && gamma_m.is_finite() && gamma_w.is_finite()) {
                    return fail("non-finite parameter".into());
                }
                if gamma_m < 0.0 || gamma_w < 0.0 {
                    return fail(format!(
                        "rates must be >= 0: gamma_m={gamma_m}, gamma_w={gamma_w}"
                    ));
                }
            }
            ClockModel::ThreeLevelAthermal {
                omega_m,
                omega_c,
                theta,
                gamma_m,
                gamma_c,
                gamma_w,
                ..
            } => {
                if [omega_m, omega_c, gamma_m, gamma_c, gamma_w]
                    .iter()
                    .any(|x| !x.is_finite())
                {
                    return fail("non-finite parameter".into());
                }
                if gamma_m < 0.0 || gamma_c < 0.0 || gamma_w < 0.0 {
                    return fail("rates must be >= 0".into());
                }
                if !(omega_m > omega_c && omega_c >= 0.0) {
                    return fail(format!(
                        "level splittings must satisfy omega_m > omega_c >= 0, got {omega_m}, {omega_c}"
                    ));
                }
                if !(0.0..=std::f64::consts::PI).contains(&theta) {
                    return fail(format!("theta must lie in [0, pi], got {theta}"));
                }
            }
            ClockModel::ThreeLevelHybrid {
                omega_m,
                omega_c,
                theta,
                gamma_m,
                gamma_c,
                gamma_w,
                gamma_h,
                beta_h_omega_m,
                beta_c_omega_c,
                ..
            } => {
                if [
                    omega_m,
                    omega_c,
                    gamma_m,
                    gamma_c,
                    gamma_w,
                    gamma_h,
                    beta_h_omega_m,
                    beta_c_omega_c,
                ]
                .iter()
                .any(|x| !x.is_finite())
                {
                    return fail("non-finite parameter".into());
                }
                if gamma_m < 0.0 || gamma_c < 0.0 || gamma_w < 0.0 || gamma_h < 0.0 {
                    return fail("rates must be >= 0".into());
                }
                if !(omega_m > omega_c && omega_c >= 0.0) {
                    return fail(format!(
                        "level splittings must satisfy omega_m > omega_c >= 0, got {omega_m}, {omega_c}"
                    ));
                }
                if !(0.0..=std::f64::consts::PI).contains(&theta) {
                    return fail(format!("theta must lie in [0, pi], got {theta}"));
                }
            }
        }
        Ok(())
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        match self {
            ClockModel::TwoLevelAthermal { .. } => 2,
            _ => 3,
        }
    }

    pub fn gamma_m(&self) -> f64 {
        match *self {
            ClockModel::TwoLevelAthermal { gamma_m, .. }
            | ClockModel::ThreeLevelAthermal { gamma_m, .. }
            | ClockModel::ThreeLevelHybrid { gamma_m, .. } => gamma_m,
        }
    }

    pub fn gamma_w(&self) -> f64 {
        match *self {
            ClockModel::TwoLevelAthermal { gamma_w, .. }
            | ClockModel::ThreeLevelAthermal { gamma_w, .. }
            | ClockModel::ThreeLevelHybrid { gamma_w, .. } => gamma_w,
        }
    }

    pub fn gamma_c(&self) -> Option<f64> {
        match *self {
            ClockModel::TwoLevelAthermal { .. } => None,
            ClockModel::ThreeLevelAthermal { gamma_c, .. }
            | ClockModel::ThreeLevelHybrid { gamma_c, .. } => Some(gamma_c),
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match *self {
            ClockModel::TwoLevelAthermal { .. } => None,
            ClockModel::ThreeLevelAthermal { theta, .. }
            | ClockModel::ThreeLevelHybrid { theta, .. } => Some(theta),
        }
    }

    /// Clockwork splitting Ω_w: the full splitting Ω for a two-level clock,
    /// Ω_m − Ω_c for three-level clocks.
    pub fn omega_w(&self) -> f64 {
        match *self {
            ClockModel::TwoLevelAthermal { omega, .. } => omega,
            ClockModel::ThreeLevelAthermal {
                omega_m, omega_c, ..
            }
            | ClockModel::ThreeLevelHybrid {
                omega_m, omega_c, ..
            } => omega_m - omega_c,
        }
    }

    /// Largest rate in the model, used for time-step sanity checks. Thermal
    /// absorption rates are suppressed by e^{−βΩ} ≤ 1, so the bare rates
    /// dominate.
    pub fn max_rate(&self) -> f64 {
        match *self {
            ClockModel::TwoLevelAthermal {
                gamma_m, gamma_w, ..
            } => gamma_m.max(gamma_w),
            ClockModel::ThreeLevelAthermal {
                gamma_m,
                gamma_c,
                gamma_w,
                ..
            } => gamma_m.max(gamma_c).max(gamma_w),
            ClockModel::ThreeLevelHybrid {
                gamma_m,
                gamma_c,
                gamma_w,
                gamma_h,
                ..
            } => gamma_m.max(gamma_c).max(gamma_w).max(gamma_h),
        }
    }

    /// Index of the level whose population sets the tick probability
    /// (|m⟩ or |e⟩; index 0 in both basis conventions).
    pub const TICK_LEVEL: usize = 0;

    /// Index of the ground level.
    pub fn ground_index(&self) -> usize {
        self.dim() - 1
    }
}

/// Clock Hamiltonian in the fixed basis: diag(Ω, 0) or diag(Ω_m, Ω_c, 0).
pub fn hamiltonian(model: &ClockModel) -> ComplexMatrix {
    match *model {
        ClockModel::TwoLevelAthermal { omega, .. } => ComplexMatrix::diag(&[omega, 0.0]),
        ClockModel::ThreeLevelAthermal {
            omega_m, omega_c, ..
        }
        | ClockModel::ThreeLevelHybrid {
            omega_m, omega_c, ..
        } => ComplexMatrix::diag(&[omega_m, omega_c, 0.0]),
    }
}

/// σ_x = |e⟩⟨g| + |g⟩⟨e| of the two-level clock.
pub fn sigma_x() -> ComplexMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[&[zero, one], &[one, zero]])
}

/// Spin basis vectors |θ,φ,±⟩ in the {|m⟩, |c⟩, |g⟩} basis.
fn spin_basis(theta: f64, phi: f64) -> ([Complex64; 3], [Complex64; 3]) {
    let half = theta / 2.0;
    let zero = Complex64::new(0.0, 0.0);
    let plus = [
        Complex64::new(half.cos(), 0.0),
        zero,
        Complex64::from_polar(half.sin(), -phi),
    ];
    let minus = [
        Complex64::from_polar(half.sin(), phi),
        zero,
        Complex64::new(-half.cos(), 0.0),
    ];
    (plus, minus)
}

/// Measured spin observable X̂(θ,φ) = |θ,φ,+⟩⟨θ,φ,+| − |θ,φ,−⟩⟨θ,φ,−|.
///
/// Eigenvalues are {+1, 0, −1}; |c⟩ is a dark state with X̂|c⟩ = 0.
pub fn spin_observable(theta: f64, phi: f64) -> ComplexMatrix {
    let (plus, minus) = spin_basis(theta, phi);
    &ComplexMatrix::outer(&plus, &plus) - &ComplexMatrix::outer(&minus, &minus)
}

/// The observable monitored by the weak measurement: σ_x for two-level
/// clocks, X̂(θ,φ) for three-level clocks.
pub fn measured_observable(model: &ClockModel) -> ComplexMatrix {
    match *model {
        ClockModel::TwoLevelAthermal { .. } => sigma_x(),
        ClockModel::ThreeLevelAthermal { theta, phi, .. }
        | ClockModel::ThreeLevelHybrid { theta, phi, .. } => spin_observable(theta, phi),
    }
}

/// Gaussian weak-measurement family for one time step.
///
/// Carries the spectral decomposition of the measured observable so that
/// M(r) can be evaluated exactly by applying the scalar Gaussian to each
/// eigenvalue.
#[derive(Debug, Clone)]
pub struct GaussianMeasurement {
    observable: ComplexMatrix,
    epsilon_m: f64,
    /// (eigenvalue, spectral projector) pairs.
    spectral: Vec<(f64, ComplexMatrix)>,
}

impl GaussianMeasurement {
    pub fn for_model(model: &ClockModel, dt: f64) -> Self {
        let epsilon_m = model.gamma_m() * dt;
        match *model {
            ClockModel::TwoLevelAthermal { .. } => {
                let inv = std::f64::consts::FRAC_1_SQRT_2;
                let plus = [Complex64::new(inv, 0.0), Complex64::new(inv, 0.0)];
                let minus = [Complex64::new(inv, 0.0), Complex64::new(-inv, 0.0)];
                Self {
                    observable: sigma_x(),
                    epsilon_m,
                    spectral: vec![
                        (1.0, ComplexMatrix::outer(&plus, &plus)),
                        (-1.0, ComplexMatrix::outer(&minus, &minus)),
                    ],
                }
            }
            ClockModel::ThreeLevelAthermal { theta, phi, .. }
            | ClockModel::ThreeLevelHybrid { theta, phi, .. } => {
                let (plus, minus) = spin_basis(theta, phi);
                let dark = [
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ];
                Self {
                    observable: spin_observable(theta, phi),
                    epsilon_m,
                    spectral: vec![
                        (1.0, ComplexMatrix::outer(&plus, &plus)),
                        (0.0, ComplexMatrix::outer(&dark, &dark)),
                        (-1.0, ComplexMatrix::outer(&minus, &minus)),
                    ],
                }
            }
        }
    }

    /// Test-only constructor that overrides the measurement strength.
    pub fn with_epsilon(mut self, epsilon_m: f64) -> Self {
        self.epsilon_m = epsilon_m;
        self
    }

    pub fn observable(&self) -> &ComplexMatrix {
        &self.observable
    }

    pub fn epsilon_m(&self) -> f64 {
        self.epsilon_m
    }

    /// (eigenvalue, spectral projector) pairs of the measured observable.
    pub fn spectral_pairs(&self) -> &[(f64, ComplexMatrix)] {
        &self.spectral
    }
}

/// Measurement operator M(r) = (4ε_m/π)^{1/4} exp[−2ε_m (r − X̂)²].
///
/// Evaluated in the eigenbasis of X̂, which is exact for every ε_m and r.
pub fn gaussian_kraus(gm: &GaussianMeasurement, r: f64) -> ComplexMatrix {
    let eps = gm.epsilon_m;
    let prefactor = (4.0 * eps / std::f64::consts::PI).powf(0.25);
    let dim = gm.observable.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (lambda, projector) in &gm.spectral {
        let weight = prefactor * (-2.0 * eps * (r - lambda) * (r - lambda)).exp();
        out = &out + &projector.scale_re(weight);
    }
    out
}

/// One sampled weak-measurement readout.
///
/// The engine never consumes these (the clocks leave the spin record
/// unobserved); they exist to validate the stochastic readout model
/// r ≈ ⟨X̂⟩ + dW/(√(8γ_m)·dt) against its ensemble moments.
#[derive(Debug, Clone, Copy)]
pub struct ReadoutSample {
    /// Readout value r.
    pub r: f64,
    /// Underlying Wiener increment with variance dt.
    pub dw: f64,
}

/// Draws a readout for state ρ. The Gaussian increment uses a Box–Muller
/// transform so the mapping from uniform draws is fixed and documented.
pub fn sample_readout(
    gm: &GaussianMeasurement,
    rho: &ComplexMatrix,
    gamma_m: f64,
    dt: f64,
    rng: &mut impl Rng,
) -> ReadoutSample {
    let expectation = (&gm.observable * rho).trace().re;
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let gauss = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    let dw = gauss * dt.sqrt();
    ReadoutSample {
        r: expectation + dw / ((8.0 * gamma_m).sqrt() * dt),
        dw,
    }
}

/// A two-outcome jump channel: no-event operator M(0) and event operator
/// M(1), with M(0)†M(0) + M(1)†M(1) = 𝟙.
#[derive(Debug, Clone)]
pub struct KrausPair {
    pub m_no_event: ComplexMatrix,
    pub m_event: ComplexMatrix,
    pub epsilon: f64,
}

impl KrausPair {
    /// Builds the pair for a jump operator J whose J†J is a projector:
    /// M(1) = √ε·J and M(0) = 𝟙 − (1 − √(1−ε))·J†J.
    pub fn from_jump(jump: &ComplexMatrix, epsilon: f64) -> Result<Self, ModelError> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(ModelError::EpsilonOutOfRange(epsilon));
        }
        let dim = jump.rows();
        let jj = &jump.dagger() * jump;
        let deficit = 1.0 - (1.0 - epsilon).sqrt();
        let m_no_event = &ComplexMatrix::identity(dim) - &jj.scale_re(deficit);
        Ok(Self {
            m_no_event,
            m_event: jump.scale_re(epsilon.sqrt()),
            epsilon,
        })
    }

    /// Largest entrywise deviation from M(0)†M(0) + M(1)†M(1) = 𝟙.
    pub fn completeness_defect(&self) -> f64 {
        let sum = &(&self.m_no_event.dagger() * &self.m_no_event)
            + &(&self.m_event.dagger() * &self.m_event);
        sum.max_abs_diff(&ComplexMatrix::identity(sum.rows()))
    }

    /// Applies the channel with outcomes summed over (unobserved):
    /// ρ ↦ M(0)ρM(0)† + M(1)ρM(1)†.
    pub fn apply_unobserved(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let a = &(&self.m_no_event * rho) * &self.m_no_event.dagger();
        let b = &(&self.m_event * rho) * &self.m_event.dagger();
        &a + &b
    }
}

/// The discrete jump channels of the clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpChannel {
    /// Monitored fluorescence in the clockwork subspace (|m⟩→|c⟩, or
    /// |e⟩→|g⟩ for the two-level clock). Each detected photon is a tick.
    Clockwork,
    /// Unobserved spontaneous emission |c⟩→|g⟩ (three-level only).
    Loss,
}

/// Kraus pair for a jump channel at event weight ε = γ·dt.
pub fn jump_kraus_pair(
    channel: JumpChannel,
    dim: usize,
    epsilon: f64,
) -> Result<KrausPair, ModelError> {
    let jump = match (channel, dim) {
        (JumpChannel::Clockwork, 2) => {
            // |g⟩⟨e|
            let mut j = ComplexMatrix::zeros(2, 2);
            j[(1, 0)] = Complex64::new(1.0, 0.0);
            j
        }
        (JumpChannel::Clockwork, 3) => {
            // |c⟩⟨m|
            let mut j = ComplexMatrix::zeros(3, 3);
            j[(1, 0)] = Complex64::new(1.0, 0.0);
            j
        }
        (JumpChannel::Loss, 3) => {
            // |g⟩⟨c|
            let mut j = ComplexMatrix::zeros(3, 3);
            j[(2, 1)] = Complex64::new(1.0, 0.0);
            j
        }
        (JumpChannel::Clockwork, d) => {
            return Err(ModelError::ChannelDimension {
                channel: "clockwork",
                dim: d,
            })
        }
        (JumpChannel::Loss, d) => {
            return Err(ModelError::ChannelDimension {
                channel: "loss",
                dim: d,
            })
        }
    };
    KrausPair::from_jump(&jump, epsilon)
}

/// Superoperator of the hybrid clock's thermal reservoirs, D_c + D_h with
/// emission and e^{−βΩ}-suppressed absorption. `None` for athermal models.
///
/// The trajectory engine exponentiates this once per run and applies the
/// resulting exact semigroup map as the hybrid's unobserved relaxation
/// stage.
pub fn thermal_generator(model: &ClockModel) -> Option<ComplexMatrix> {
    match *model {
        ClockModel::TwoLevelAthermal { .. } | ClockModel::ThreeLevelAthermal { .. } => None,
        ClockModel::ThreeLevelHybrid {
            gamma_c,
            gamma_h,
            beta_h_omega_m,
            beta_c_omega_c,
            ..
        } => {
            let mut lower_cg = ComplexMatrix::zeros(3, 3);
            lower_cg[(2, 1)] = Complex64::new(1.0, 0.0); // |g⟩⟨c|
            let mut lower_mg = ComplexMatrix::zeros(3, 3);
            lower_mg[(2, 0)] = Complex64::new(1.0, 0.0); // |g⟩⟨m|
            let mut w = dissipator_term(&lower_cg, gamma_c, gamma_c);
            let cold_abs = gamma_c * (-beta_c_omega_c).exp();
            let hot_abs = gamma_h * (-beta_h_omega_m).exp();
            w = &w + &dissipator_term(&lower_cg.dagger(), cold_abs, cold_abs);
            w = &w + &dissipator_term(&lower_mg, gamma_h, gamma_h);
            w = &w + &dissipator_term(&lower_mg.dagger(), hot_abs, hot_abs);
            Some(w)
        }
    }
}

/// Superoperator for γ_jump·LρL† − γ_anti·{L†L, ρ}/2 (the jump and
/// anticommutator weights separate so the monitored channel can carry the
/// e^{−s} counting factor on the jump term only).
fn dissipator_term(l: &ComplexMatrix, gamma_jump: f64, gamma_anti: f64) -> ComplexMatrix {
    let dim = l.rows();
    let eye = ComplexMatrix::identity(dim);
    let ldag = l.dagger();
    let ll = &ldag * l;
    let jump = superop_term(l, &ldag).expect("square operators");
    let left = superop_term(&ll, &eye).expect("square operators");
    let right = superop_term(&eye, &ll).expect("square operators");
    &jump.scale_re(gamma_jump) - &(&left + &right).scale_re(0.5 * gamma_anti)
}

/// Assembles the tilted generator 𝒲(s) of the model as a d²×d² matrix:
/// −i[Ĥ,·] − γ_m[X̂,[X̂,·]] plus the model's dissipators, with the
/// monitored clockwork jump term weighted by e^{−s}.
///
/// The clockwork anticommutator carries γ_w for every model, so the
/// untilted generator is trace preserving and the two-level spectrum
/// reproduces the closed-form cumulant generating function.
pub fn tilted_generator(model: &ClockModel, s: f64) -> Superoperator {
    let dim = model.dim();
    let eye = ComplexMatrix::identity(dim);
    let h = hamiltonian(model);
    let x = measured_observable(model);
    let i = Complex64::new(0.0, 1.0);

    // −i[H, ρ] = −i(Hρ − ρH).
    let h_left = superop_term(&h, &eye).expect("square operators");
    let h_right = superop_term(&eye, &h).expect("square operators");
    let mut w = (&h_left - &h_right).scale(-i);

    // −γ_m [X, [X, ρ]] = −γ_m (X²ρ + ρX² − 2XρX).
    let xx = &x * &x;
    let gm = model.gamma_m();
    let pump = &(&superop_term(&xx, &eye).expect("square operators")
        + &superop_term(&eye, &xx).expect("square operators"))
        - &superop_term(&x, &x).expect("square operators").scale_re(2.0);
    w = &w - &pump.scale_re(gm);

    // Monitored clockwork channel with the counting field on the jump term.
    let gw = model.gamma_w();
    let mut tick_jump = ComplexMatrix::zeros(dim, dim);
    tick_jump[(1, 0)] = Complex64::new(1.0, 0.0);
    w = &w + &dissipator_term(&tick_jump, gw * (-s).exp(), gw);

    match *model {
        ClockModel::TwoLevelAthermal { .. } => {}
        ClockModel::ThreeLevelAthermal { gamma_c, .. } => {
            let mut loss = ComplexMatrix::zeros(3, 3);
            loss[(2, 1)] = Complex64::new(1.0, 0.0);
            w = &w + &dissipator_term(&loss, gamma_c, gamma_c);
        }
        ClockModel::ThreeLevelHybrid {
            gamma_c,
            gamma_h,
            beta_h_omega_m,
            beta_c_omega_c,
            ..
        } => {
            let mut lower_cg = ComplexMatrix::zeros(3, 3);
            lower_cg[(2, 1)] = Complex64::new(1.0, 0.0);
            let mut lower_mg = ComplexMatrix::zeros(3, 3);
            lower_mg[(2, 0)] = Complex64::new(1.0, 0.0);
            let cold_abs = gamma_c * (-beta_c_omega_c).exp();
            let hot_abs = gamma_h * (-beta_h_omega_m).exp();
            w = &w + &dissipator_term(&lower_cg, gamma_c, gamma_c);
            w = &w + &dissipator_term(&lower_cg.dagger(), cold_abs, cold_abs);
            w = &w + &dissipator_term(&lower_mg, gamma_h, gamma_h);
            w = &w + &dissipator_term(&lower_mg.dagger(), hot_abs, hot_abs);
        }
    }

    Superoperator::new(dim, w, s)
}

/// Frobenius norm of [X̂, Ĥ], the non-commutativity that fuels the clock;
/// equals √2·Ω_m·|sin θ|. Three-level models only.
pub fn commutator_norm(model: &ClockModel) -> Result<f64, ModelError> {
    match model {
        ClockModel::TwoLevelAthermal { .. } => Err(ModelError::RequiresThreeLevel),
        _ => {
            let x = measured_observable(model);
            let h = hamiltonian(model);
            Ok(x.commutator(&h).frobenius_norm())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{
        gauss_hermite, rightmost_eigenvalue, steady_null_vector, unvec_matrix, vec_matrix,
        NumericsConfig,
    };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

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

    fn hybrid_fig4(theta: f64) -> ClockModel {
        ClockModel::ThreeLevelHybrid {
            omega_m: 1.0,
            omega_c: 0.1,
            theta,
            phi: 0.0,
            gamma_m: 3.0,
            gamma_c: 4.0,
            gamma_w: 3.0,
            gamma_h: 4.0,
            beta_h_omega_m: 3.0,
            beta_c_omega_c: 100.0,
        }
    }

    #[test]
    fn hamiltonian_matches_fixed_basis() {
        let h2 = hamiltonian(&two_level(1.0, 6.0));
        assert!(h2.approx_eq(&ComplexMatrix::diag(&[1.0, 0.0]), 0.0));

        let h3 = hamiltonian(&three_level(0.5, 3.0, 4.0, 3.0));
        assert!(h3.approx_eq(&ComplexMatrix::diag(&[1.0, 0.1, 0.0]), 0.0));
    }

    #[test]
    fn spin_observable_at_the_poles() {
        let x0 = spin_observable(0.0, 0.0);
        assert!(x0.approx_eq(&ComplexMatrix::diag(&[1.0, 0.0, -1.0]), 1e-15));

        // θ=π/2, φ=0: |m⟩⟨g| + |g⟩⟨m|.
        let xeq = spin_observable(std::f64::consts::FRAC_PI_2, 0.0);
        let mut expected = ComplexMatrix::zeros(3, 3);
        expected[(0, 2)] = c(1.0, 0.0);
        expected[(2, 0)] = c(1.0, 0.0);
        assert!(xeq.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn spin_observable_grid_properties() {
        // Hermitian, X³ = X (spectrum in {−1, 0, 1}), dark state X|c⟩ = 0.
        for i in 0..13 {
            let theta = std::f64::consts::PI * i as f64 / 12.0;
            for j in 0..8 {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
                let x = spin_observable(theta, phi);
                assert!(x.hermiticity_defect() <= 1e-12);
                let x3 = &(&x * &x) * &x;
                assert!(x3.approx_eq(&x, 1e-12));
                let dark = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
                let xc = x.mul_vec(&dark);
                assert!(xc.iter().all(|z| z.norm() <= 1e-12));
            }
        }
    }

    #[test]
    fn gaussian_kraus_weights_at_unit_readout() {
        let model = two_level(1.0, 6.0);
        let gm = GaussianMeasurement::for_model(&model, 0.05);
        let eps = gm.epsilon_m();
        let m = gaussian_kraus(&gm, 1.0);
        let prefactor = (4.0 * eps / std::f64::consts::PI).powf(0.25);
        // ⟨+|M|+⟩ = prefactor, ⟨−|M|−⟩ = prefactor·e^{−8ε}.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(inv, 0.0), c(inv, 0.0)];
        let minus = [c(inv, 0.0), c(-inv, 0.0)];
        let mp = m.mul_vec(&plus);
        let w_plus = (plus[0].conj() * mp[0] + plus[1].conj() * mp[1]).re;
        let mm = m.mul_vec(&minus);
        let w_minus = (minus[0].conj() * mm[0] + minus[1].conj() * mm[1]).re;
        assert!((w_plus - prefactor).abs() < 1e-14);
        assert!((w_minus - prefactor * (-8.0 * eps).exp()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_kraus_weak_limit_preserves_state_direction() {
        let model = two_level(1.0, 6.0);
        let gm = GaussianMeasurement::for_model(&model, 1e-9);
        let m = gaussian_kraus(&gm, 0.37);
        let normalized = m.scale_re(1.0 / (m.trace().re / 2.0));
        assert!(normalized.approx_eq(&ComplexMatrix::identity(2), 1e-6));
    }

    #[test]
    fn gaussian_completeness_by_quadrature() {
        // ∫ M(r)†M(r) dr = 𝟙, checked with 64-node Gauss–Hermite after the
        // substitution x = 2√ε·r.
        let rule = gauss_hermite(64);
        for &eps_m in &[1e-4, 1e-2, 0.1, 0.3] {
            for model in [two_level(1.0, 6.0), three_level(0.9, 1.0, 4.0, 3.0)] {
                let gm = GaussianMeasurement::for_model(&model, 1.0).with_epsilon(eps_m);
                let dim = gm.observable().rows();
                let mut acc = ComplexMatrix::zeros(dim, dim);
                let scale = 2.0 * eps_m.sqrt();
                for &(x, w) in &rule {
                    let r = x / scale;
                    let m = gaussian_kraus(&gm, r);
                    let weight = w * (x * x).exp() / scale;
                    acc = &acc + &(&m.dagger() * &m).scale_re(weight);
                }
                let defect = acc.max_abs_diff(&ComplexMatrix::identity(dim));
                assert!(defect <= 1e-8, "eps={eps_m}: defect {defect:.2e}");
            }
        }
    }

    #[test]
    fn jump_pair_zero_epsilon_is_identity_channel() {
        let pair = jump_kraus_pair(JumpChannel::Clockwork, 3, 0.0).unwrap();
        assert!(pair.m_no_event.approx_eq(&ComplexMatrix::identity(3), 0.0));
        assert!(pair.m_event.max_abs() == 0.0);
    }

    #[test]
    fn clockwork_event_lowers_m_to_c_only() {
        let eps = 0.03;
        let pair = jump_kraus_pair(JumpChannel::Clockwork, 3, eps).unwrap();
        let m_ket = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = pair.m_event.mul_vec(&m_ket);
        assert!((out[1] - c(eps.sqrt(), 0.0)).norm() < 1e-15);
        assert!(out[0].norm() == 0.0 && out[2].norm() == 0.0);
        // |c⟩ and |g⟩ are annihilated.
        for dead in [
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ] {
            assert!(pair.m_event.mul_vec(&dead).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn kraus_pairs_match_printed_matrices() {
        let eps = 0.2;
        let w = jump_kraus_pair(JumpChannel::Clockwork, 3, eps).unwrap();
        let expected0 = ComplexMatrix::diag(&[(1.0 - eps).sqrt(), 1.0, 1.0]);
        assert!(w.m_no_event.approx_eq(&expected0, 1e-15));

        let l = jump_kraus_pair(JumpChannel::Loss, 3, eps).unwrap();
        let expected0 = ComplexMatrix::diag(&[1.0, (1.0 - eps).sqrt(), 1.0]);
        assert!(l.m_no_event.approx_eq(&expected0, 1e-15));
        let mut expected1 = ComplexMatrix::zeros(3, 3);
        expected1[(2, 1)] = c(eps.sqrt(), 0.0);
        assert!(l.m_event.approx_eq(&expected1, 1e-15));
    }

    #[test]
    fn kraus_completeness_tight() {
        for &eps in &[0.003, 0.03, 0.3] {
            for (channel, dim) in [
                (JumpChannel::Clockwork, 2),
                (JumpChannel::Clockwork, 3),
                (JumpChannel::Loss, 3),
            ] {
                let pair = jump_kraus_pair(channel, dim, eps).unwrap();
                assert!(pair.completeness_defect() <= 1e-15);
            }
        }
    }

    #[test]
    fn jump_pair_rejects_large_epsilon() {
        assert!(matches!(
            jump_kraus_pair(JumpChannel::Loss, 3, 1.0),
            Err(ModelError::EpsilonOutOfRange(_))
        ));
        assert!(jump_kraus_pair(JumpChannel::Loss, 2, 0.1).is_err());
    }

    #[test]
    fn untilted_generators_have_zero_mode() {
        for model in [
            two_level(1.0, 6.0),
            three_level(std::f64::consts::FRAC_PI_2, 3.0, 4.0, 3.0),
            hybrid_fig4(std::f64::consts::FRAC_PI_2),
        ] {
            let w = tilted_generator(&model, 0.0);
            let top = rightmost_eigenvalue(&w).unwrap();
            assert!(top.re.abs() <= 1e-10, "{model:?}: {top}");
            assert!(top.im.abs() <= 1e-10);
        }
    }

    #[test]
    fn trace_functional_annihilates_untilted_generators() {
        for model in [
            two_level(1.5, 6.0),
            three_level(1.1, 3.0, 4.0, 3.0),
            hybrid_fig4(std::f64::consts::PI),
        ] {
            let w = tilted_generator(&model, 0.0);
            let d = model.dim();
            let n = d * d;
            for col in 0..n {
                let mut acc = c(0.0, 0.0);
                for i in 0..d {
                    acc += w.matrix()[(i * d + i, col)];
                }
                assert!(acc.norm() <= 1e-12, "column {col} sums to {acc}");
            }
        }
    }

    #[test]
    fn two_level_steady_state_populations() {
        let model = two_level(1.0, 6.0);
        let w = tilted_generator(&model, 0.0);
        let rho = steady_null_vector(&w, &NumericsConfig::default()).unwrap();
        // P_e = 2γ_m/(4γ_m + γ_w) = 0.2.
        assert!((rho.population(0) - 0.2).abs() < 1e-12);
        assert!((rho.population(1) - 0.8).abs() < 1e-12);
        assert!(rho.coherence(0, 1).norm() < 1e-12);
    }

    #[test]
    fn pumping_term_equals_hermitian_dissipator_form() {
        // −γ_m[X,[X,ρ]] = γ_m(LρL† − {L†L, ρ}/2) with L = √2·X̂.
        let model = three_level(1.2, 2.0, 4.0, 3.0);
        let x = measured_observable(&model);
        let l = x.scale_re(std::f64::consts::SQRT_2);
        let gm = model.gamma_m();

        let rho = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64))
            .hermitized();

        let double_comm = x.commutator(&x.commutator(&rho)).scale_re(-gm);
        let ll = &l.dagger() * &l;
        let sandwich = &(&l * &rho) * &l.dagger();
        let anti = &(&ll * &rho) + &(&rho * &ll);
        let dissipator = (&sandwich - &anti.scale_re(0.5)).scale_re(gm);
        assert!(double_comm.approx_eq(&dissipator, 1e-12));
    }

    #[test]
    fn commutator_norm_profile() {
        let at = |theta: f64| commutator_norm(&three_level(theta, 3.0, 4.0, 3.0)).unwrap();
        assert!(at(0.0).abs() < 1e-12);
        assert!((at(std::f64::consts::FRAC_PI_2) - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(at(std::f64::consts::PI).abs() < 2e-12);
        // Mirror symmetry θ ↔ π−θ.
        for i in 0..7 {
            let theta = std::f64::consts::PI * i as f64 / 12.0;
            assert!((at(theta) - at(std::f64::consts::PI - theta)).abs() < 1e-12);
        }
        assert!(commutator_norm(&two_level(1.0, 6.0)).is_err());
    }

    #[test]
    fn generator_applies_like_its_superoperator_matrix() {
        let model = three_level(0.7, 3.0, 4.0, 3.0);
        let w = tilted_generator(&model, 0.3);
        let rho = ComplexMatrix::from_fn(3, 3, |i, j| c(0.1 * (i as f64 + 1.0), 0.05 * j as f64))
            .hermitized();
        let applied = w.apply(&rho);
        let via_vec = unvec_matrix(&w.matrix().mul_vec(&vec_matrix(&rho)), 3);
        assert!(applied.approx_eq(&via_vec, 1e-14));
    }

    #[test]
    fn readout_moments_track_expectation_and_variance() {
        use rand::SeedableRng;
        let model = two_level(2.0, 6.0);
        let dt = 1e-3;
        let gm = GaussianMeasurement::for_model(&model, dt);
        // ρ = |+⟩⟨+| has ⟨σ_x⟩ = 1.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(inv, 0.0), c(inv, 0.0)];
        let rho = ComplexMatrix::outer(&plus, &plus);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| sample_readout(&gm, &rho, model.gamma_m(), dt, &mut rng).r)
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
        let expected_var = 1.0 / (8.0 * model.gamma_m() * dt);
        let se_mean = (expected_var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 4.0 * se_mean, "mean {mean}");
        assert!((var - expected_var).abs() / expected_var < 0.02, "var {var}");
    }

    #[test]
    fn model_validation_rejects_bad_parameters() {
        assert!(two_level(-1.0, 6.0).validate().is_err());
        assert!(three_level(4.0, 3.0, 4.0, 3.0).validate().is_err()); // θ > π
        let bad_levels = ClockModel::ThreeLevelAthermal {
            omega_m: 0.1,
            omega_c: 1.0,
            theta: 0.5,
            phi: 0.0,
            gamma_m: 1.0,
            gamma_c: 1.0,
            gamma_w: 1.0,
        };
        assert!(bad_levels.validate().is_err());
        assert!(hybrid_fig4(std::f64::consts::FRAC_PI_2).validate().is_ok());
    }

    #[test]
    fn thermal_generator_only_for_hybrid_and_traceless() {
        assert!(thermal_generator(&two_level(1.0, 6.0)).is_none());
        assert!(thermal_generator(&three_level(0.5, 3.0, 4.0, 3.0)).is_none());
        let w = thermal_generator(&hybrid_fig4(0.5)).unwrap();
        // Trace functional annihilates the thermal part on its own.
        for col in 0..9 {
            let mut acc = c(0.0, 0.0);
            for i in 0..3 {
                acc += w[(i * 3 + i, col)];
            }
            assert!(acc.norm() <= 1e-12);
        }
    }
}
