// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Partial-pivot elimination and singular values for small complex systems.

use num_complex::Complex64;

use super::eig::eigenvalues_hermitian;
use super::matrix::ComplexMatrix;
use super::NumericsError;

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(NumericsError::DimensionMismatch(format!(
            "solve needs square A and matching b, got {}x{} and {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.max_abs().max(1.0);

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if pivot_mag < f64::EPSILON * scale * n as f64 {
            return Err(NumericsError::SingularSystem(pivot_mag));
        }
        if pivot_row != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = t;
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m[(col, col)];
        for row in col + 1..n {
            let factor = m[(row, col)] / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let val = m[(row, j)] - factor * m[(col, j)];
                m[(row, j)] = val;
            }
            rhs[row] = rhs[row] - factor * rhs[col];
        }
    }

    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc -= m[(row, j)] * x[j];
        }
        x[row] = acc / m[(row, row)];
    }
    Ok(x)
}

/// Matrix exponential by scaling-and-squaring with a Taylor core.
///
/// The argument is scaled so its max-norm is below 1/4, the series is
/// summed to machine precision, and the result squared back up. Intended
/// for generator exponentials with ‖M‖·dt well below one.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let norm = m.max_abs() * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.scale_re(0.5f64.powi(squarings as i32));

    let mut acc = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = (&term * &scaled).scale_re(1.0 / k as f64);
        acc = &acc + &term;
        if term.max_abs() < 1e-18 * acc.max_abs().max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Singular values of a square matrix, ascending.
///
/// Computed as square roots of the (real, nonnegative) spectrum of A†A;
/// accurate enough at d² ≤ 9 for the null-space degeneracy guard.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let gram = &a.dagger() * a;
    eigenvalues_hermitian(&gram)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect()
}
