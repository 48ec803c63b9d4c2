// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Hermite quadrature nodes and weights.
//!
//! Roots of the degree-n Hermite polynomial are bracketed by a sign scan and
//! polished with Newton's method on the orthonormal recurrence (which stays
//! O(1) in magnitude, unlike the monic polynomials). Weights come from the
//! Christoffel function, wᵢ = 1 / Σ_{k<n} h̃ₖ(xᵢ)².

use std::sync::OnceLock;

/// Evaluates the orthonormal Hermite functions h̃₀..h̃ₙ at x and returns
/// (h̃ₙ(x), h̃ₙ₋₁(x), Σ_{k<n} h̃ₖ(x)²).
fn hermite_eval(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0f64; // h̃_{-1}
    let mut cur = std::f64::consts::PI.powf(-0.25); // h̃_0
    let mut kernel = 0.0f64;
    for k in 0..n {
        kernel += cur * cur;
        let next = (x * cur - (k as f64 / 2.0).sqrt() * prev) / (((k + 1) as f64) / 2.0).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev, kernel)
}

fn compute_nodes(n: usize) -> Vec<(f64, f64)> {
    // All roots lie inside (−√(2n+1), √(2n+1)).
    let bound = ((2 * n + 1) as f64).sqrt() + 1.0;
    let grid = 60 * n;
    let step = 2.0 * bound / grid as f64;

    let mut brackets = Vec::with_capacity(n);
    let mut x_prev = -bound;
    let mut f_prev = hermite_eval(n, x_prev).0;
    for i in 1..=grid {
        let x = -bound + i as f64 * step;
        let f = hermite_eval(n, x).0;
        if f_prev == 0.0 {
            brackets.push((x_prev, x_prev));
        } else if f_prev.signum() != f.signum() {
            brackets.push((x_prev, x));
        }
        x_prev = x;
        f_prev = f;
    }
    assert_eq!(brackets.len(), n, "missed Hermite roots in the sign scan");

    brackets
        .into_iter()
        .map(|(mut a, mut b)| {
            // A few bisection steps to stabilize, then Newton to convergence.
            for _ in 0..20 {
                let mid = 0.5 * (a + b);
                let fm = hermite_eval(n, mid).0;
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fm.signum() == hermite_eval(n, a).0.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let mut x = 0.5 * (a + b);
            for _ in 0..50 {
                let (f, f_lower, _) = hermite_eval(n, x);
                // h̃ₙ'(x) = √(2n)·h̃ₙ₋₁(x).
                let df = (2.0 * n as f64).sqrt() * f_lower;
                let dx = f / df;
                x -= dx;
                if dx.abs() < 1e-15 * (1.0 + x.abs()) {
                    break;
                }
            }
            let kernel = hermite_eval(n, x).2;
            (x, 1.0 / kernel)
        })
        .collect()
}

/// Nodes and weights for ∫ e^{−x²} f(x) dx ≈ Σ wᵢ f(xᵢ), ascending in x.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    static CACHE_64: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    if n == 64 {
        return CACHE_64.get_or_init(|| compute_nodes(64)).clone();
    }
    compute_nodes(n)
}
