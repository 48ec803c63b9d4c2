// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for small matrices.
//!
//! Everything here targets Hilbert-space dimensions d ∈ {2, 3}, so
//! superoperators are at most 9×9. Textbook dense methods (partial-pivot
//! elimination, Hessenberg reduction plus shifted QR) are accurate and fast
//! at this size and keep the crate free of heavyweight solver dependencies.
//!
//! The vectorization convention is column-stacking throughout:
//! `vec(ρ)[j·d + i] = ρ[i][j]`, so that `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)`.

mod eig;
mod matrix;
mod quad;
mod solve;

use num_complex::Complex64;
use thiserror::Error;

pub use eig::{eigenvalues, eigenvalues_hermitian, min_eigenvalue_hermitian, rightmost_eigenvalue_matrix};
pub use matrix::ComplexMatrix;
pub use quad::gauss_hermite;
pub use solve::{expm, singular_values, solve_linear};

/// Numerical tolerances used by the solvers and state validation.
///
/// Centralized so that every residual, Hermiticity, positivity and equality
/// threshold in the crate is pinned in one place.
#[derive(Debug, Clone, Copy)]
pub struct NumericsConfig {
    /// Residual bound for null-vector solves, ‖W·vec(ρ)‖.
    pub residual_tol: f64,
    /// Maximum entrywise deviation from ρ = ρ†.
    pub hermiticity_tol: f64,
    /// Eigenvalues of ρ may dip below zero by at most this amount.
    pub positivity_tol: f64,
    /// Entrywise tolerance for matrix equality comparisons.
    pub equality_tol: f64,
    /// Null-space degeneracy guard: the second-smallest singular value of a
    /// generator must exceed this fraction of the largest one.
    pub null_degeneracy_ratio: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            hermiticity_tol: 1e-9,
            positivity_tol: 1e-9,
            equality_tol: 1e-12,
            null_degeneracy_ratio: 1e-8,
        }
    }
}

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensolver did not converge within {0} QR iterations")]
    EigensolverFailed(usize),
    #[error("linear system is numerically singular (pivot {0:.3e})")]
    SingularSystem(f64),
    #[error("non-unique steady state: second singular value {second:.3e} is below {threshold:.3e}")]
    NonUniqueSteadyState { second: f64, threshold: f64 },
    #[error("steady-state residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("not a valid density matrix: {0}")]
    InvalidState(String),
    #[error("operation requires an untilted generator, got s = {0}")]
    TiltedGenerator(f64),
}

/// Column-stacks a square matrix into a vector of length d².
pub fn vec_matrix(m: &ComplexMatrix) -> Vec<Complex64> {
    let d = m.rows();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec_matrix`]: reshapes a length-d² vector into a d×d matrix.
pub fn unvec_matrix(v: &[Complex64], d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d, "unvec length mismatch");
    ComplexMatrix::from_fn(d, d, |i, j| v[j * d + i])
}

/// Superoperator matrix for the map ρ ↦ AρB, i.e. Bᵀ ⊗ A.
///
/// `A` and `B` must be square and of equal dimension.
pub fn superop_term(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() {
        return Err(NumericsError::DimensionMismatch(format!(
            "superop_term needs equal square matrices, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(b.transpose().kron(a))
}

/// A superoperator acting on column-stacked density matrices.
///
/// `tilt` is the counting-field value s carried by the generator; the
/// monitored jump term is weighted by e^{−s}, so `tilt = 0` is the physical
/// (trace-preserving) generator.
#[derive(Debug, Clone)]
pub struct Superoperator {
    hilbert_dim: usize,
    matrix: ComplexMatrix,
    tilt: f64,
}

impl Superoperator {
    pub fn new(hilbert_dim: usize, matrix: ComplexMatrix, tilt: f64) -> Self {
        assert_eq!(matrix.rows(), hilbert_dim * hilbert_dim);
        assert_eq!(matrix.cols(), hilbert_dim * hilbert_dim);
        Self {
            hilbert_dim,
            matrix,
            tilt,
        }
    }

    /// Hilbert-space dimension d (the matrix is d²×d²).
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    /// Applies the superoperator to a density operator: unvec(W·vec(ρ)).
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let v = self.matrix.mul_vec(&vec_matrix(rho));
        unvec_matrix(&v, self.hilbert_dim)
    }
}

/// A trace-one, Hermitian, positive-semidefinite d×d state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix as a quantum state.
    ///
    /// The trace is renormalized to one exactly; Hermiticity and positivity
    /// must hold within the configured tolerances.
    pub fn new(matrix: ComplexMatrix, cfg: &NumericsConfig) -> Result<Self, NumericsError> {
        if matrix.rows() != matrix.cols() {
            return Err(NumericsError::InvalidState(format!(
                "state must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-9 {
            return Err(NumericsError::InvalidState(format!(
                "trace {tr} too far from one"
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > cfg.hermiticity_tol {
            return Err(NumericsError::InvalidState(format!(
                "Hermiticity defect {defect:.3e} exceeds {:.3e}",
                cfg.hermiticity_tol
            )));
        }
        let min_eig = min_eigenvalue_hermitian(&matrix);
        if min_eig < -cfg.positivity_tol {
            return Err(NumericsError::InvalidState(format!(
                "minimum eigenvalue {min_eig:.3e} below -{:.3e}",
                cfg.positivity_tol
            )));
        }
        let matrix = matrix.scale(Complex64::new(1.0 / tr.re, 0.0));
        Ok(Self { matrix })
    }

    /// Wraps without validation. For internal stepping where the caller has
    /// already checked the state.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// Ground state |g⟩⟨g| (the last basis vector by convention).
    pub fn ground(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(dim - 1, dim - 1)] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// Pure state |ψ⟩⟨ψ| from (not necessarily normalized) amplitudes.
    pub fn pure(amplitudes: &[Complex64]) -> Self {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let scale = 1.0 / norm.sqrt();
        let psi: Vec<Complex64> = amplitudes.iter().map(|a| a * scale).collect();
        Self {
            matrix: ComplexMatrix::outer(&psi, &psi),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Population of basis level `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    /// Off-diagonal element ρ_ij.
    pub fn coherence(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Smallest eigenvalue; slightly negative values signal numerical noise.
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue_hermitian(&self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }
}

/// Solves W·vec(ρ) = 0 for the unique trace-one steady state.
///
/// One row of the d²×d² system is replaced with the trace-one constraint and
/// the square system is solved by partial-pivot elimination. Uniqueness is
/// verified by checking that only one singular value of W is negligible.
pub fn steady_null_vector(
    w: &Superoperator,
    cfg: &NumericsConfig,
) -> Result<DensityMatrix, NumericsError> {
    if w.tilt() != 0.0 {
        return Err(NumericsError::TiltedGenerator(w.tilt()));
    }
    let d = w.hilbert_dim();
    let n = d * d;

    let sigma = singular_values(w.matrix());
    let sigma_max = sigma[n - 1];
    let threshold = cfg.null_degeneracy_ratio * sigma_max;
    if sigma[1] < threshold {
        return Err(NumericsError::NonUniqueSteadyState {
            second: sigma[1],
            threshold,
        });
    }

    // Replace the first row with the trace functional and solve A x = e_0.
    let mut a = w.matrix().clone();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[0] = Complex64::new(1.0, 0.0);
    for col in 0..n {
        a[(0, col)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..d {
        a[(0, i * d + i)] = Complex64::new(1.0, 0.0);
    }
    let x = solve_linear(&a, &rhs)?;

    let residual_vec = w.matrix().mul_vec(&x);
    let residual = residual_vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > cfg.residual_tol {
        return Err(NumericsError::ResidualTooLarge {
            residual,
            tol: cfg.residual_tol,
        });
    }

    let rho = unvec_matrix(&x, d).hermitized();
    DensityMatrix::new(rho, cfg)
}

/// Eigenvalue of W with the largest real part.
pub fn rightmost_eigenvalue(w: &Superoperator) -> Result<Complex64, NumericsError> {
    rightmost_eigenvalue_matrix(w.matrix())
}
