// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Non-Hermitian eigenvalues of small dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by explicitly
//! shifted QR iteration with Wilkinson shifts and deflation. See Golub & Van
//! Loan, "Matrix Computations", ch. 7. The matrices here are at most 9×9
//! (superoperators for Hilbert dimension 3), where this converges in a
//! handful of sweeps per eigenvalue.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::NumericsError;

const MAX_QR_ITERATIONS: usize = 100;

/// All eigenvalues of a square complex matrix, in deflation order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>, NumericsError> {
    if m.rows() != m.cols() {
        return Err(NumericsError::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut h = m.clone();
    hessenberg_in_place(&mut h);

    let scale = h.max_abs().max(1.0);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n;
    let mut stalled = 0usize;

    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Deflate converged subdiagonal entries at the bottom of the block.
        let sub = h[(hi - 1, hi - 2)].norm();
        let local = h[(hi - 1, hi - 1)].norm() + h[(hi - 2, hi - 2)].norm();
        let tol = f64::EPSILON * if local > 0.0 { local } else { scale };
        if sub <= tol {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if stalled >= MAX_QR_ITERATIONS {
            return Err(NumericsError::EigensolverFailed(MAX_QR_ITERATIONS));
        }

        // Find the top of the active block: first negligible subdiagonal
        // above row `hi`.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let d = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let t = f64::EPSILON * if d > 0.0 { d } else { scale };
            if s <= t {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        let shift = if stalled > 0 && stalled.is_multiple_of(12) {
            // Exceptional shift to break rare limit cycles.
            Complex64::new(h[(hi - 1, hi - 2)].norm() + h[(hi - 1, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
        stalled += 1;
    }
    Ok(eigs)
}

/// Eigenvalue with the largest real part.
pub fn rightmost_eigenvalue_matrix(m: &ComplexMatrix) -> Result<Complex64, NumericsError> {
    let eigs = eigenvalues(m)?;
    Ok(eigs
        .into_iter()
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .expect("matrix dimension is positive"))
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Cyclic complex Jacobi rotations; backward stable at machine precision,
/// including for degenerate spectra (pure states have repeated zero
/// eigenvalues, where characteristic-polynomial formulas lose √ε accuracy).
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut a = m.hermitized();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-18 * scale {
                    continue;
                }
                // Phase factor maps the 2×2 pivot block to a real problem.
                let omega = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u_qp = -omega.conj() * s; // U[q][p]
                let u_qq = omega.conj() * c; // U[q][q]

                // Columns: A ← A·U.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * u_qp;
                    a[(i, q)] = aip * s + aiq * u_qq;
                }
                // Rows: A ← U†·A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * u_qp.conj();
                    a[(q, j)] = apj * s + aqj * u_qq.conj();
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Smallest eigenvalue of a Hermitian matrix. Used for positivity checks.
pub fn min_eigenvalue_hermitian(m: &ComplexMatrix) -> f64 {
    eigenvalues_hermitian(m)[0]
}

/// Unitary similarity reduction to upper Hessenberg form.
fn hessenberg_in_place(h: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n.
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm_x;
        x[0] -= alpha;
        let norm_v = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_v < f64::EPSILON * norm_x {
            continue;
        }
        let v: Vec<Complex64> = x.iter().map(|z| z / norm_v).collect();

        // H ← (I − 2vv†) H, rows k+1..n.
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + idx, j)];
            }
            let s2 = 2.0 * s;
            for (idx, vi) in v.iter().enumerate() {
                let val = h[(k + 1 + idx, j)] - vi * s2;
                h[(k + 1 + idx, j)] = val;
            }
        }
        // H ← H (I − 2vv†), columns k+1..n.
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                s += h[(i, k + 1 + idx)] * vi;
            }
            let s2 = 2.0 * s;
            for (idx, vi) in v.iter().enumerate() {
                let val = h[(i, k + 1 + idx)] - s2 * vi.conj();
                h[(i, k + 1 + idx)] = val;
            }
        }
        // Entries below the first subdiagonal are now zero up to rounding.
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the trailing 2×2 block closest to the corner entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 2, hi - 2)];
    let b = h[(hi - 2, hi - 1)];
    let c = h[(hi - 1, hi - 2)];
    let d = h[(hi - 1, hi - 1)];
    let half = (a + d) * 0.5;
    let rad = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let l1 = half + rad;
    let l2 = half - rad;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR sweep on the active block `lo..hi`.
///
/// Givens rotations zero the subdiagonal of H − μI; RQ + μI restores the
/// Hessenberg form with the same spectrum.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (a / r, b / r)
        };
        // Left-multiply rows k, k+1 by [[c̄, s̄], [−s, c]].
        for j in k..hi {
            let top = h[(k, j)];
            let bot = h[(k + 1, j)];
            h[(k, j)] = c.conj() * top + s.conj() * bot;
            h[(k + 1, j)] = -s * top + c * bot;
        }
        rotations.push((k, c, s));
    }
    for &(k, c, s) in &rotations {
        // Right-multiply columns k, k+1 by the adjoint rotation.
        let top_row = (k + 2).min(hi);
        for i in lo..top_row {
            let left = h[(i, k)];
            let right = h[(i, k + 1)];
            h[(i, k)] = left * c + right * s;
            h[(i, k + 1)] = -left * s.conj() + right * c.conj();
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}
