//! Coefficient of ergodicity and the contraction checks built on it.
//!
//! All functions here take column-stochastic matrices. Row-stochastic
//! matrices (such as those in [`crate::consensus`]) must be transposed first.

use rand::Rng;
use serde::Serialize;

use crate::dense::{damp, is_column_stochastic, Dense};
use crate::dist_single::{average_matrix_single, build_ai_dense, mhat_single};
use crate::webgraph::LinkMatrix;
use crate::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-9;
/// Largest dimension for the dense per-page matrix construction.
pub const MAX_DENSE_DIM: usize = 200;

fn ensure_stochastic(p: &Dense) -> Result<()> {
    if !is_column_stochastic(p, STOCHASTIC_TOL) {
        return Err(Error::validation("matrix is not column-stochastic"));
    }
    Ok(())
}

/// `τ(P)` together with a maximizing column pair.
pub fn tau_with_pair(p: &Dense) -> Result<(f64, (usize, usize))> {
    ensure_stochastic(p)?;
    let n = p.ncols();
    let mut best = (0.0, (0, 0));
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = p.column(i).iter().zip(p.column(j).iter()).map(|(a, b)| (a - b).abs()).sum();
            if 0.5 * d > best.0 {
                best = (0.5 * d, (i, j));
            }
        }
    }
    Ok(best)
}

/// Coefficient of ergodicity `τ(P) = ½ max_{i,j} Σ_r |p_ri - p_rj|`.
pub fn tau(p: &Dense) -> Result<f64> {
    tau_with_pair(p).map(|(t, _)| t)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub factor_taus: Vec<f64>,
    pub product_tau: f64,
    /// `Π τ(P(i))`.
    pub bound: f64,
    /// `max_r (max_i t_ri - min_i t_ri)` of the product.
    pub max_column_spread: f64,
}

/// Checks submultiplicativity on the backward product `P(k) ⋯ P(0)`, where
/// `ps[0]` is `P(0)`.
pub fn tau_product_check(ps: &[Dense]) -> Result<ProductReport> {
    let first = ps.first().ok_or_else(|| Error::validation("empty matrix sequence"))?;
    let n = first.nrows();
    let mut factor_taus = Vec::with_capacity(ps.len());
    let mut product = Dense::identity(n, n);
    for p in ps {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.nrows() });
        }
        factor_taus.push(tau(p)?);
        product = p * product;
    }
    let product_tau = tau(&product)?;
    let bound: f64 = factor_taus.iter().product();
    if product_tau > bound + 1e-10 {
        return Err(Error::Consistency(format!(
            "τ of the product {product_tau} exceeds the product of factor τ values {bound}"
        )));
    }
    let max_column_spread = product
        .row_iter()
        .map(|r| r.max() - r.min())
        .fold(0.0, f64::max);
    Ok(ProductReport { factor_taus, product_tau, bound, max_column_spread })
}

/// Random zero-sum vector with unit ℓ1 norm.
pub fn random_zero_sum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm: f64 = v.iter().map(|x| x.abs()).sum();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn image_l1(p: &Dense, x: &[f64]) -> f64 {
    (p * nalgebra::DVector::from_column_slice(x)).abs().sum()
}

/// Checks the variational form of `τ`: `||P x||_1 <= τ(P)` for sampled
/// zero-sum unit vectors, with equality at `(e_i - e_j) / 2` for the
/// maximizing pair.
pub fn tau_variational_check<R: Rng + ?Sized>(p: &Dense, trials: usize, rng: &mut R) -> Result<bool> {
    if trials == 0 {
        return Err(Error::validation("at least one trial is required"));
    }
    let (t, (i, j)) = tau_with_pair(p)?;
    let n = p.ncols();
    let bounded = (0..trials).all(|_| image_l1(p, &random_zero_sum(n, rng)) <= t + 1e-10);
    let mut extreme = vec![0.0; n];
    if i != j {
        extreme[i] = 0.5;
        extreme[j] = -0.5;
    }
    let attained = (image_l1(p, &extreme) - t).abs() <= 1e-12;
    Ok(bounded && attained)
}

/// Mean-square error bound `4 (2 + m̂) / (m̂ (k + 1))` for the time average.
pub fn ms_error_bound(mhat: f64, k: u64) -> f64 {
    4.0 * (2.0 + mhat) / (mhat * (k as f64 + 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct TauBoundReport {
    pub mhat: f64,
    pub per_page: Vec<f64>,
    pub average: f64,
    pub limit: f64,
}

/// Checks `τ(M_i) <= 1 - m̂` for every single-update matrix and for their
/// average.
pub fn tau_mhat_bounds(a: &LinkMatrix, m: f64) -> Result<TauBoundReport> {
    let n = a.dim();
    if n > MAX_DENSE_DIM {
        return Err(Error::Capacity(format!("dense τ checks are limited to n <= {MAX_DENSE_DIM}, got {n}")));
    }
    let mhat = mhat_single(m, n);
    let limit = 1.0 - mhat;
    let per_page = (0..n)
        .map(|i| tau(&damp(&build_ai_dense(a, i), mhat)))
        .collect::<Result<Vec<_>>>()?;
    let average = tau(&damp(&average_matrix_single(a)?, mhat))?;
    if let Some((i, t)) = per_page.iter().enumerate().find(|(_, &t)| t > limit + 1e-10) {
        return Err(Error::Consistency(format!("τ(M_{i}) = {t} exceeds 1 - m̂ = {limit}")));
    }
    if average > limit + 1e-10 {
        return Err(Error::Consistency(format!("τ of the average = {average} exceeds 1 - m̂ = {limit}")));
    }
    Ok(TauBoundReport { mhat, per_page, average, limit })
}
