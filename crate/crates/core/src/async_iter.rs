//! Randomized asynchronous power iteration.
//!
//! Flagged pages recompute their own row of the Google matrix from the
//! current values; all other pages hold. Unlike the schemes with rescaled
//! damping, no time average is needed.
//!
//! The iteration matrices are not stochastic, so `Σ x` drifts and the raw
//! state settles on a run-dependent multiple `c x*`. The tracked estimate is
//! therefore the normalized state `x / Σ x`, which converges to `x*`.

use crate::dist_simul::UpdatePattern;
use crate::rng::stream_rng;
use crate::sim::{Recorder, RunConfig, SchemeParams, SimTrace, TraceMeta, TraceSample};
use crate::webgraph::{l1_dist, linf_dist, LinkMatrix};
use crate::{Error, Result};

/// Flagged rows get `(1 - m)(A x)_i + (m/n) Σ x`; other rows are copied.
pub fn async_update(a: &LinkMatrix, p: &UpdatePattern, m: f64, x: &[f64]) -> Vec<f64> {
    let n = a.dim();
    let teleport = m / n as f64 * x.iter().sum::<f64>();
    let mut out = x.to_vec();
    for i in (0..n).filter(|&i| p.is_set(i)) {
        out[i] = (1.0 - m) * a.row_dot(i, x) + teleport;
    }
    out
}

pub fn step_async(x: &mut Vec<f64>, a: &LinkMatrix, p: &UpdatePattern, m: f64) {
    *x = async_update(a, p, m, x);
}

/// Normalized state `x / Σ x`.
pub fn normalized(x: &[f64]) -> Vec<f64> {
    let s: f64 = x.iter().sum();
    x.iter().map(|v| v / s).collect()
}

/// Runs asynchronous iteration until the normalized state is within `tol`
/// of `x*` in the max norm, or `cfg.steps` steps have elapsed.
///
/// Error columns measure the normalized state and `sum_y` reports the raw
/// `Σ x`. `final_x` is the raw state, `final_y` its normalization, and
/// `stopped_at` is set when the tolerance was met.
pub fn simulate_async(
    a: &LinkMatrix,
    x_star: &[f64],
    p: &SchemeParams,
    cfg: &RunConfig,
    tol: f64,
) -> Result<SimTrace> {
    p.validate()?;
    let n = a.dim();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_star.len() });
    }
    let mut rng = stream_rng(p.seed, p.stream);
    let mut x = cfg.initial.materialize(n, &mut rng)?;
    let mut rec = Recorder::new(x_star, cfg);
    let sample = |k: u64, x: &[f64]| {
        let est = normalized(x);
        let s = TraceSample {
            k,
            err_l1: l1_dist(&est, x_star),
            err_linf: linf_dist(&est, x_star),
            sum_y: x.iter().sum(),
            ms_bound: None,
        };
        (s, est)
    };
    let (first, est) = sample(0, &x);
    rec.push_raw(first, &x, &est);
    let mut pattern = UpdatePattern::none(n);
    let mut stopped_at = (first.err_linf <= tol).then_some(0);
    let mut k = 0;
    while stopped_at.is_none() && k < cfg.steps {
        pattern.resample(&mut rng, p.alpha);
        step_async(&mut x, a, &pattern, p.m);
        k += 1;
        if linf_dist(&normalized(&x), x_star) <= tol {
            stopped_at = Some(k);
        }
        if rec.due(k) {
            let (s, est) = sample(k, &x);
            rec.push_raw(s, &x, &est);
        }
    }
    let (last, est) = sample(k, &x);
    rec.push_raw(last, &x, &est);
    let meta = TraceMeta {
        scheme: "async".into(),
        n,
        params: *p,
        mhat: None,
        steps: cfg.steps,
        sample_every: cfg.sample_every,
    };
    Ok(rec.finish(meta, stopped_at, x, est))
}

/// Least-squares slope of `ln err_linf` against `k`, over samples with a
/// positive error. `None` with fewer than two usable samples.
pub fn log_error_slope(samples: &[TraceSample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.err_linf > 0.0)
        .map(|s| (s.k as f64, s.err_linf.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mk = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let me = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mk).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mk) * (p.1 - me)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_single::simulate_single;
    use crate::spectral::pagerank;
    use crate::webgraph::{apply_google, example_web};

    #[test]
    fn full_and_empty_patterns() {
        let a = example_web().link_matrix().unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        assert!(l1_dist(&async_update(&a, &UpdatePattern::all(4), 0.15, &x), &apply_google(&a, 0.15, &x)) < 1e-15);
        assert_eq!(async_update(&a, &UpdatePattern::none(4), 0.15, &x), x.to_vec());
    }

    #[test]
    fn pagerank_is_fixed_by_every_pattern() {
        let a = example_web().link_matrix().unwrap();
        let x_star = pagerank(&a, 0.15, 1e-15).unwrap().x_star;
        for mask in 0..16 {
            let out = async_update(&a, &UpdatePattern::from_mask(4, mask), 0.15, &x_star);
            assert!(linf_dist(&out, &x_star) <= 1e-12);
        }
    }

    #[test]
    fn converges_with_negative_log_slope() {
        let a = example_web().link_matrix().unwrap();
        let x_star = pagerank(&a, 0.15, 1e-15).unwrap().x_star;
        for seed in 0..5 {
            let t = simulate_async(&a, &x_star, &SchemeParams::new(0.15, 0.5, seed), &RunConfig::new(100_000, 1), 1e-8).unwrap();
            assert!(t.stopped_at.is_some());
            assert!(t.last().err_linf <= 1e-8);
            assert!(log_error_slope(&t.samples).unwrap() < 0.0);
        }
    }

    #[test]
    fn raw_state_drifts_to_a_multiple_of_pagerank() {
        let a = example_web().link_matrix().unwrap();
        let x_star = pagerank(&a, 0.15, 1e-15).unwrap().x_star;
        let t = simulate_async(&a, &x_star, &SchemeParams::new(0.15, 0.5, 0), &RunConfig::new(10_000, 100), 1e-12).unwrap();
        let c: f64 = t.final_x.iter().sum();
        assert!((c - 1.0).abs() > 1e-3);
        assert!(t.final_x.iter().zip(x_star.iter()).all(|(x, s)| (x - c * s).abs() < 1e-10));
        assert!(l1_dist(&t.final_y, &normalized(&t.final_x)) == 0.0);
    }

    #[test]
    fn full_probability_matches_power_iteration_count() {
        let a = example_web().link_matrix().unwrap();
        let x_star = pagerank(&a, 0.15, 1e-15).unwrap().x_star;
        let tol = 1e-8;
        let mut x = vec![0.25; 4];
        let mut count = 0;
        while linf_dist(&x, &x_star) > tol {
            x = apply_google(&a, 0.15, &x);
            count += 1;
        }
        let t = simulate_async(&a, &x_star, &SchemeParams::new(0.15, 1.0, 8), &RunConfig::new(10_000, 1), tol).unwrap();
        assert_eq!(t.stopped_at, Some(count));
        assert!(l1_dist(&t.final_x, &x) < 1e-15);
    }

    #[test]
    fn deterministic_and_reports_horizon() {
        let a = example_web().link_matrix().unwrap();
        let x_star = pagerank(&a, 0.15, 1e-15).unwrap().x_star;
        let p = SchemeParams::new(0.15, 0.3, 4);
        let cfg = RunConfig::new(20, 5);
        let t1 = simulate_async(&a, &x_star, &p, &cfg, 1e-14).unwrap();
        assert_eq!(t1, simulate_async(&a, &x_star, &p, &cfg, 1e-14).unwrap());
        assert_eq!(t1.stopped_at, None);
        assert_eq!(t1.last().k, 20);
    }

    #[test]
    fn raw_single_update_state_keeps_oscillating() {
        let a = example_web().link_matrix().unwrap();
        let x_star = pagerank(&a, 0.15, 1e-15).unwrap().x_star;
        let tol = 1e-8;
        let cfg = RunConfig::new(20_000, 1).keep_states();
        let t = simulate_single(&a, &x_star, &SchemeParams::new(0.15, 1.0, 2), &cfg).unwrap();
        let late = &t.states[10_000..];
        let amplitude = (0..4)
            .map(|i| {
                let hi = late.iter().map(|s| s.x[i]).fold(f64::MIN, f64::max);
                let lo = late.iter().map(|s| s.x[i]).fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max);
        assert!(amplitude > 10.0 * tol);
    }

    #[test]
    fn slope_helper() {
        let s = |k, e| TraceSample { k, err_l1: e, err_linf: e, sum_y: 1.0, ms_bound: None };
        let samples = [s(0, 1.0), s(1, 0.5), s(2, 0.25)];
        assert!((log_error_slope(&samples).unwrap() + std::f64::consts::LN_2).abs() < 1e-12);
        assert!(log_error_slope(&samples[..1]).is_none());
    }
}
