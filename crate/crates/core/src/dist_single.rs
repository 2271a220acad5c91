//! Single-update scheme: at each step one uniformly drawn page initiates an
//! update with its direct neighbors.
//!
//! The state follows `x(k+1) = (1 - m̂) A_θ(k) x(k) + (m̂ / n) 1`, where the
//! distributed link matrix `A_i` keeps row and column `i` of `A` and puts
//! `1 - a_iℓ` on the remaining diagonal. The raw state keeps oscillating; the
//! time average `y(k)` converges in mean square to PageRank.

use crate::dense::{all_ones, Dense};
use crate::ergodicity::ms_error_bound;
use crate::rng::{stream_rng, uniform_page};
use crate::sim::{validate_damping, Recorder, RunConfig, SchemeParams, SimState, SimTrace, TraceMeta};
use crate::webgraph::LinkMatrix;
use crate::{Error, Result};

/// Rescaled damping `2m / (n - m (n - 2))`.
pub fn mhat_single(m: f64, n: usize) -> f64 {
    let n = n as f64;
    2.0 * m / (n - m * (n - 2.0))
}

/// Dense distributed link matrix `A_i`.
pub fn build_ai_dense(a: &LinkMatrix, i: usize) -> Dense {
    let n = a.dim();
    Dense::from_fn(n, n, |j, l| {
        if j == i || l == i {
            a.get(j, l)
        } else if j == l {
            1.0 - a.get(i, l)
        } else {
            0.0
        }
    })
}

/// `(1 - m̂) A_i x + (m̂ / n) 1` in `O(n + deg(i))`.
pub fn single_update(a: &LinkMatrix, i: usize, mhat: f64, x: &[f64]) -> Vec<f64> {
    let n = a.dim();
    let mut ax = x.to_vec();
    // Pages linking to i hand part of their value to i.
    for &j in a.row_support(i) {
        ax[j] -= a.col_value(j) * x[j];
    }
    // Pages i links to receive part of x_i.
    let share = a.col_value(i) * x[i];
    for &j in a.col_support(i) {
        ax[j] += share;
    }
    ax[i] = a.row_dot(i, x);
    let teleport = mhat / n as f64;
    ax.iter().map(|v| (1.0 - mhat) * v + teleport).collect()
}

pub fn step_single(s: &mut SimState, a: &LinkMatrix, i: usize, mhat: f64) {
    let next = single_update(a, i, mhat, &s.x);
    s.advance(next);
}

/// Dense average `(1/n) Σ_i A_i`, checked against `(2/n) A + ((n-2)/n) I`.
pub fn average_matrix_single(a: &LinkMatrix) -> Result<Dense> {
    let n = a.dim();
    let mut sum = Dense::zeros(n, n);
    for i in 0..n {
        sum += build_ai_dense(a, i);
    }
    let avg = sum / n as f64;
    let nf = n as f64;
    let closed = a.to_dense() * (2.0 / nf) + Dense::identity(n, n) * ((nf - 2.0) / nf);
    let gap = (&avg - &closed).abs().max();
    if gap > 1e-12 {
        return Err(Error::Consistency(format!(
            "average of single-update matrices deviates from its closed form by {gap:e}"
        )));
    }
    Ok(avg)
}

/// Dense `M̄ = (1 - m̂) Ā + (m̂ / n) S` for the single-update scheme.
pub fn average_modified_single(a: &LinkMatrix, m: f64) -> Result<Dense> {
    let n = a.dim();
    let mhat = mhat_single(m, n);
    Ok(average_matrix_single(a)? * (1.0 - mhat) + all_ones(n) * (mhat / n as f64))
}

/// Runs the single-update scheme for `cfg.steps` steps.
///
/// `x_star` is the reference PageRank vector the error columns are measured
/// against.
pub fn simulate_single(
    a: &LinkMatrix,
    x_star: &[f64],
    p: &SchemeParams,
    cfg: &RunConfig,
) -> Result<SimTrace> {
    validate_damping(p.m)?;
    let n = a.dim();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_star.len() });
    }
    let mhat = mhat_single(p.m, n);
    let mut rng = stream_rng(p.seed, p.stream);
    let mut state = SimState::new(cfg.initial.materialize(n, &mut rng)?);
    let mut rec = Recorder::new(x_star, cfg).with_ms_bound(|k| ms_error_bound(mhat, k));
    rec.record(0, &state.y, &state.x, &state.y);
    for _ in 0..cfg.steps {
        let page = uniform_page(&mut rng, n);
        step_single(&mut state, a, page, mhat);
        if rec.due(state.k) {
            rec.record(state.k, &state.y, &state.x, &state.y);
        }
    }
    rec.record(state.k, &state.y, &state.x, &state.y);
    let meta = TraceMeta {
        scheme: "single".into(),
        n,
        params: *p,
        mhat: Some(mhat),
        steps: cfg.steps,
        sample_every: cfg.sample_every,
    };
    Ok(rec.finish(meta, None, state.x, state.y))
}
