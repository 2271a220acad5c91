//! Simultaneous-update scheme: every page independently initiates an update
//! with probability α at each step.

use rand::Rng;

use crate::dense::{all_ones, Dense};
use crate::ergodicity::ms_error_bound;
use crate::rng::{bernoulli_pattern, stream_rng};
use crate::sim::{Recorder, RunConfig, SchemeParams, SimState, SimTrace, TraceMeta};
use crate::webgraph::LinkMatrix;
use crate::{Error, Result};

/// Largest dimension for the `2^n` pattern enumeration.
pub const MAX_ENUMERATION_DIM: usize = 12;
/// Largest dimension for exact binomial coefficients.
pub const MAX_BINOMIAL_DIM: usize = 64;

/// Which pages initiate an update during one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdatePattern(Vec<bool>);

impl UpdatePattern {
    pub fn new(flags: Vec<bool>) -> Self {
        UpdatePattern(flags)
    }

    pub fn none(n: usize) -> Self {
        UpdatePattern(vec![false; n])
    }

    pub fn all(n: usize) -> Self {
        UpdatePattern(vec![true; n])
    }

    pub fn single(n: usize, page: usize) -> Self {
        let mut flags = vec![false; n];
        flags[page] = true;
        UpdatePattern(flags)
    }

    /// Pattern whose bit `i` of `mask` flags page `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        UpdatePattern((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    /// One Bernoulli(α) variate per page, in page-id order.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, alpha: f64, n: usize) -> Self {
        let mut flags = vec![false; n];
        bernoulli_pattern(rng, alpha, &mut flags);
        UpdatePattern(flags)
    }

    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R, alpha: f64) {
        bernoulli_pattern(rng, alpha, &mut self.0);
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn is_set(&self, page: usize) -> bool {
        self.0[page]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&f| f).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rescaled damping `m [1 - (1-α)^2] / (1 - m (1-α)^2)`.
pub fn mhat_simul(m: f64, alpha: f64) -> f64 {
    let q = (1.0 - alpha) * (1.0 - alpha);
    m * (1.0 - q) / (1.0 - m * q)
}

/// Dense pattern matrix `A_p`.
pub fn build_ap_dense(a: &LinkMatrix, p: &UpdatePattern) -> Dense {
    let n = a.dim();
    let mut out = Dense::zeros(n, n);
    for j in 0..n {
        for (i, v) in a.column(j) {
            if p.is_set(i) || p.is_set(j) {
                out[(i, j)] = v;
            }
        }
        if !p.is_set(j) {
            let pushed: f64 = a.column(j).filter(|&(h, _)| p.is_set(h)).map(|(_, v)| v).sum();
            out[(j, j)] = 1.0 - pushed;
        }
    }
    out
}

/// Sparse `A_p x`, touching only the rows and columns of flagged pages
/// besides the identity part.
pub fn pattern_product(a: &LinkMatrix, p: &UpdatePattern, x: &[f64]) -> Vec<f64> {
    let n = a.dim();
    let mut out = x.to_vec();
    for (i, o) in out.iter_mut().enumerate() {
        if p.is_set(i) {
            *o = a.row_dot(i, x);
        }
    }
    for j in (0..n).filter(|&j| p.is_set(j)) {
        let v = a.col_value(j) * x[j];
        for &i in a.col_support(j) {
            if !p.is_set(i) {
                out[i] += v;
            }
        }
        for &i in a.row_support(j) {
            if !p.is_set(i) {
                out[i] -= a.col_value(i) * x[i];
            }
        }
    }
    out
}

/// `(1 - m̂) A_p x + (m̂ / n) 1`.
pub fn pattern_update(a: &LinkMatrix, p: &UpdatePattern, mhat: f64, x: &[f64]) -> Vec<f64> {
    let teleport = mhat / a.dim() as f64;
    pattern_product(a, p, x).into_iter().map(|v| (1.0 - mhat) * v + teleport).collect()
}

pub fn step_simul(s: &mut SimState, a: &LinkMatrix, p: &UpdatePattern, mhat: f64) {
    let next = pattern_update(a, p, mhat, &s.x);
    s.advance(next);
}

/// Closed form of the average pattern matrix: `[1-(1-α)^2] A + (1-α)^2 I`.
pub fn average_matrix_simul_closed(a: &LinkMatrix, alpha: f64) -> Dense {
    let n = a.dim();
    let q = (1.0 - alpha) * (1.0 - alpha);
    a.to_dense() * (1.0 - q) + Dense::identity(n, n) * q
}

/// Average pattern matrix by enumerating all `2^n` patterns.
pub fn average_matrix_simul_bruteforce(a: &LinkMatrix, alpha: f64) -> Result<Dense> {
    let n = a.dim();
    check_enumerable(n)?;
    let mut avg = Dense::zeros(n, n);
    for mask in 0..(1u64 << n) {
        let ones = mask.count_ones() as i32;
        let weight = alpha.powi(ones) * (1.0 - alpha).powi(n as i32 - ones);
        if weight == 0.0 {
            continue;
        }
        avg += build_ap_dense(a, &UpdatePattern::from_mask(n, mask)) * weight;
    }
    Ok(avg)
}

/// Dense `M̄ = (1 - m̂) Ā + (m̂ / n) S` for the simultaneous scheme.
pub fn average_modified_simul(a: &LinkMatrix, m: f64, alpha: f64) -> Dense {
    let n = a.dim();
    let mhat = mhat_simul(m, alpha);
    average_matrix_simul_closed(a, alpha) * (1.0 - mhat) + all_ones(n) * (mhat / n as f64)
}

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_DIM {
        return Err(Error::Capacity(format!(
            "pattern enumeration is limited to n <= {MAX_ENUMERATION_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Exact binomial coefficient, `None` on `u64` overflow.
pub fn binomial(r: u64, k: u64) -> Option<u64> {
    if k > r {
        return Some(0);
    }
    let k = k.min(r - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(r - i) / u128::from(i + 1);
    }
    u64::try_from(acc).ok()
}

/// Row `r` of Pascal's triangle built with `C(r,k) = C(r-1,k) + C(r-1,k-1)`.
pub fn pascal_row(r: usize) -> Option<Vec<u64>> {
    let mut row = vec![1u64];
    for _ in 0..r {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(1);
        for w in row.windows(2) {
            next.push(w[0].checked_add(w[1])?);
        }
        next.push(1);
        row = next;
    }
    Some(row)
}

/// Closed form of the sum of all pattern matrices with exactly `l` flags.
pub fn ahat_closed(a: &LinkMatrix, l: usize) -> Result<Dense> {
    let n = a.dim();
    if n > MAX_BINOMIAL_DIM {
        return Err(Error::Capacity(format!(
            "exact binomial coefficients are limited to n <= {MAX_BINOMIAL_DIM}, got {n}"
        )));
    }
    if l > n {
        return Err(Error::validation(format!("flag count {l} exceeds n = {n}")));
    }
    let dense = a.to_dense();
    if l == n {
        return Ok(dense);
    }
    if l == n - 1 {
        return Ok(dense * n as f64);
    }
    let overflow = || Error::Capacity("binomial coefficient overflows u64".into());
    let c_n = binomial(n as u64, l as u64).ok_or_else(overflow)?;
    let c_n2 = binomial(n as u64 - 2, l as u64).ok_or_else(overflow)?;
    Ok(dense * (c_n - c_n2) as f64 + Dense::identity(n, n) * c_n2 as f64)
}

/// Sum of `A_p` over every pattern with exactly `l` flags, by enumeration.
pub fn ahat_bruteforce(a: &LinkMatrix, l: usize) -> Result<Dense> {
    let n = a.dim();
    check_enumerable(n)?;
    let mut sum = Dense::zeros(n, n);
    for mask in (0..(1u64 << n)).filter(|m| m.count_ones() as usize == l) {
        sum += build_ap_dense(a, &UpdatePattern::from_mask(n, mask));
    }
    Ok(sum)
}

/// Runs the simultaneous-update scheme for `cfg.steps` steps.
pub fn simulate_simul(
    a: &LinkMatrix,
    x_star: &[f64],
    p: &SchemeParams,
    cfg: &RunConfig,
) -> Result<SimTrace> {
    p.validate()?;
    let n = a.dim();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_star.len() });
    }
    let mhat = mhat_simul(p.m, p.alpha);
    let mut rng = stream_rng(p.seed, p.stream);
    let mut state = SimState::new(cfg.initial.materialize(n, &mut rng)?);
    let mut rec = Recorder::new(x_star, cfg).with_ms_bound(|k| ms_error_bound(mhat, k));
    rec.record(0, &state.y, &state.x, &state.y);
    let mut pattern = UpdatePattern::none(n);
    for _ in 0..cfg.steps {
        pattern.resample(&mut rng, p.alpha);
        step_simul(&mut state, a, &pattern, mhat);
        if rec.due(state.k) {
            rec.record(state.k, &state.y, &state.x, &state.y);
        }
    }
    rec.record(state.k, &state.y, &state.x, &state.y);
    let meta = TraceMeta {
        scheme: "simul".into(),
        n,
        params: *p,
        mhat: Some(mhat),
        steps: cfg.steps,
        sample_every: cfg.sample_every,
    };
    Ok(rec.finish(meta, None, state.x, state.y))
}
