//! Centralized reference computations on the Google matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;
use crate::sim::validate_damping;
use crate::webgraph::{apply_google, l1_dist, LinkMatrix, RankVector};
use crate::{Error, Result};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub x_star: RankVector,
    pub iterations: usize,
    /// `||M x* - x*||_1` of the returned vector.
    pub residual: f64,
}

/// Power iteration `x(k+1) = M x(k)` from a probability vector, stopped
/// when the ℓ1 step falls to `tol`.
pub fn power_method(
    a: &LinkMatrix,
    m: f64,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<PowerResult> {
    validate_damping(m)?;
    // Also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tol > 0.0) {
        return Err(Error::validation(format!("tolerance must be positive, got {tol}")));
    }
    if x0.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: x0.len() });
    }
    let mut x = RankVector::probability(x0.to_vec())?.into_inner();
    let mut last_step = f64::INFINITY;
    for iter in 1..=max_iter {
        let next = apply_google(a, m, &x);
        last_step = l1_dist(&next, &x);
        x = next;
        if last_step <= tol {
            let residual = l1_dist(&apply_google(a, m, &x), &x);
            return Ok(PowerResult { x_star: RankVector::new(x)?, iterations: iter, residual });
        }
    }
    Err(Error::NonConvergence { iterations: max_iter, last_step, last: x })
}

/// Convenience reference solve from the uniform vector.
pub fn pagerank(a: &LinkMatrix, m: f64, tol: f64) -> Result<PowerResult> {
    power_method(a, m, &RankVector::uniform(a.dim()), tol, 1_000_000)
}

const EIGEN_ITER_CAP: usize = 20_000;
const EIGEN_BLOCK: usize = 8;

/// Estimates `|λ2(M)|` on the deflated operator `x ↦ M x - (Σ x) x*`.
///
/// The deflated operator keeps every eigenvalue of `M` except the unit one,
/// which it maps to zero. A small block of zero-sum vectors is iterated and
/// the largest Ritz value modulus is returned, so complex or sign-alternating
/// second eigenvalues are handled. Intended for `n <= 200`.
pub fn second_eigen_modulus(a: &LinkMatrix, m: f64, x_star: &[f64], tol: f64) -> Result<f64> {
    validate_damping(m)?;
    let n = a.dim();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_star.len() });
    }
    let deflated = |v: &[f64]| -> Vec<f64> {
        let s: f64 = v.iter().sum();
        apply_google(a, m, v).iter().zip(x_star).map(|(mv, xs)| mv - s * xs).collect()
    };
    let block = EIGEN_BLOCK.min(n - 1);
    let mut rng = stream_rng(0x5eed, 0);
    let mut q = DMatrix::<f64>::from_fn(n, block, |_, _| rng.random::<f64>() - 0.5);
    for mut col in q.column_iter_mut() {
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
    }
    q = q.qr().q();

    let apply_block = |q: &DMatrix<f64>| {
        let mut w = DMatrix::<f64>::zeros(n, q.ncols());
        for (c, col) in q.column_iter().enumerate() {
            let image = deflated(col.as_slice());
            w.column_mut(c).copy_from_slice(&image);
        }
        w
    };

    let mut prev = f64::NAN;
    let mut stable = 0;
    for _ in 0..EIGEN_ITER_CAP {
        let w = apply_block(&q);
        let ritz = q.transpose() * &w;
        let est = ritz
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if (est - prev).abs() <= tol * 1e-2 {
            stable += 1;
            if stable >= 5 {
                return Ok(est);
            }
        } else {
            stable = 0;
        }
        prev = est;
        if w.norm() == 0.0 {
            return Ok(0.0);
        }
        q = w.qr().q();
    }
    Err(Error::NonConvergence {
        iterations: EIGEN_ITER_CAP,
        last_step: prev,
        last: Vec::new(),
    })
}

/// Upper bound `(1 - m) / (1 - m (1 - α)^2)` on the second eigenvalue modulus
/// of the simultaneous-update average matrix.
pub fn lambda2_avg_bound(m: f64, alpha: f64) -> f64 {
    let q = (1.0 - alpha) * (1.0 - alpha);
    (1.0 - m) / (1.0 - m * q)
}
