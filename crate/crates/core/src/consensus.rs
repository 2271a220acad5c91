//! Randomized averaging consensus over the web graph.
//!
//! Pattern `i` contains every self-loop plus the edges incident to agent
//! `i`. Under a pattern each agent replaces its value by the average of the
//! values it receives, so the pattern matrices are row-stochastic and the
//! raw state reaches agreement.

use crate::dense::Dense;
use crate::rng::{stream_rng, uniform_page};
use crate::sim::{Recorder, RunConfig, SchemeParams, SimTrace, TraceMeta, TraceSample};
use crate::webgraph::WebGraph;
use crate::{Error, Result};

/// Slack for rounding in the range-contraction check.
const RANGE_SLACK: f64 = 1e-15;

/// The `d = n` communication patterns, stored sparsely: for each pattern,
/// the rows that differ from the identity and their sender lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusPattern {
    n: usize,
    rows: Vec<Vec<(usize, Vec<usize>)>>,
}

impl ConsensusPattern {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of patterns `d`.
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    /// Senders `ℓ` with `(ℓ, j)` in pattern `i`, including `j` itself.
    pub fn senders(&self, i: usize, j: usize) -> Vec<usize> {
        match self.rows[i].iter().find(|(r, _)| *r == j) {
            Some((_, s)) => s.clone(),
            None => vec![j],
        }
    }

    pub fn dense(&self, i: usize) -> Dense {
        let mut out = Dense::identity(self.n, self.n);
        for (j, senders) in &self.rows[i] {
            out.row_mut(*j).fill(0.0);
            let w = 1.0 / senders.len() as f64;
            for &l in senders {
                out[(*j, l)] = w;
            }
        }
        out
    }

    pub fn matrices(&self) -> Vec<Dense> {
        (0..self.count()).map(|i| self.dense(i)).collect()
    }

    /// `A_i x`.
    pub fn apply(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (j, senders) in &self.rows[i] {
            out[*j] = senders.iter().map(|&l| x[l]).sum::<f64>() / senders.len() as f64;
        }
        out
    }

    /// Dense average `(1/d) Σ_i A_i`.
    pub fn average(&self) -> Dense {
        let mut sum = Dense::zeros(self.n, self.n);
        for i in 0..self.count() {
            sum += self.dense(i);
        }
        sum / self.count() as f64
    }
}

/// Builds the patterns from the graph, which must be strongly connected.
pub fn consensus_matrices(g: &WebGraph) -> Result<ConsensusPattern> {
    if !g.is_strongly_connected() {
        return Err(Error::validation("consensus requires a strongly connected graph"));
    }
    let n = g.page_count();
    let rows = (0..n)
        .map(|i| {
            let mut own: Vec<usize> = std::iter::once(i).chain(g.in_links(i).iter().copied()).collect();
            own.sort_unstable();
            let mut rows = vec![(i, own)];
            for &j in g.out_links(i) {
                let mut s = vec![i, j];
                s.sort_unstable();
                rows.push((j, s));
            }
            rows.sort_by_key(|r| r.0);
            rows
        })
        .collect();
    Ok(ConsensusPattern { n, rows })
}

/// `(max x - min x, Σ |x_i - mean|)`.
pub fn disagreement(x: &[f64]) -> (f64, f64) {
    let hi = x.iter().copied().fold(f64::MIN, f64::max);
    let lo = x.iter().copied().fold(f64::MAX, f64::min);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    (hi - lo, x.iter().map(|v| (v - mean).abs()).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusRun {
    pub trace: SimTrace,
    /// Whether `[min x(k), max x(k)]` shrank (weakly) at every step.
    pub range_contracted: bool,
}

/// Iterates `x(k+1) = A_θ(k) x(k)` with `θ` uniform over the patterns until
/// the spread falls to `tol` or `steps` have elapsed.
///
/// In the trace `err_linf` is the spread, `err_l1` is `Σ |x_i - mean|` and
/// `sum_y` is `Σ x`.
pub fn simulate_consensus(
    pattern: &ConsensusPattern,
    x0: &[f64],
    seed: u64,
    steps: u64,
    sample_every: u64,
    tol: f64,
) -> Result<ConsensusRun> {
    let n = pattern.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("initial values must be finite"));
    }
    let cfg = RunConfig::new(steps, sample_every);
    let mut rec = Recorder::new(&[], &cfg);
    let sample = |k: u64, x: &[f64]| {
        let (spread, dev) = disagreement(x);
        TraceSample { k, err_l1: dev, err_linf: spread, sum_y: x.iter().sum(), ms_bound: None }
    };
    let mut rng = stream_rng(seed, 0);
    let mut x = x0.to_vec();
    rec.push_raw(sample(0, &x), &x, &x);
    let range = |x: &[f64]| {
        (x.iter().copied().fold(f64::MAX, f64::min), x.iter().copied().fold(f64::MIN, f64::max))
    };
    let (mut lo, mut hi) = range(&x);
    let mut range_contracted = true;
    let mut stopped_at = (hi - lo <= tol).then_some(0);
    let mut k = 0;
    while stopped_at.is_none() && k < steps {
        let theta = uniform_page(&mut rng, pattern.count());
        x = pattern.apply(theta, &x);
        k += 1;
        let (nlo, nhi) = range(&x);
        range_contracted &= nlo >= lo - RANGE_SLACK && nhi <= hi + RANGE_SLACK;
        (lo, hi) = (nlo, nhi);
        if hi - lo <= tol {
            stopped_at = Some(k);
        }
        if rec.due(k) {
            rec.push_raw(sample(k, &x), &x, &x);
        }
    }
    rec.push_raw(sample(k, &x), &x, &x);
    let params = SchemeParams { seed, ..SchemeParams::default() };
    let meta = TraceMeta { scheme: "consensus".into(), n, params, mhat: None, steps, sample_every: cfg.sample_every };
    Ok(ConsensusRun { trace: rec.finish(meta, stopped_at, x.clone(), x), range_contracted })
}

/// Checks that the average pattern matrix has a positive diagonal and a
/// positive entry `(j, ℓ)` for every edge `ℓ -> j`.
pub fn average_is_primitive_structure(g: &WebGraph, pattern: &ConsensusPattern) -> bool {
    let avg = pattern.average();
    (0..pattern.dim()).all(|j| avg[(j, j)] > 0.0) && g.edges().all(|(l, j)| avg[(j, l)] > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{is_column_stochastic, is_row_stochastic};
    use crate::webgraph::{example_web, load_edge_list, random_web};

    #[test]
    fn example_matrices() {
        let p = consensus_matrices(&example_web()).unwrap();
        let (h, t, q) = (0.5, 1.0 / 3.0, 0.25);
        let expected = [
            [[h, 0.0, 0.0, h], [h, h, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
            [[1.0, 0.0, 0.0, 0.0], [q, q, q, q], [0.0, h, h, 0.0], [0.0, h, 0.0, h]],
            [[1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, t, t, t], [0.0, 0.0, h, h]],
            [[h, 0.0, 0.0, h], [0.0, h, 0.0, h], [0.0, 0.0, h, h], [0.0, t, t, t]],
        ];
        assert_eq!(p.count(), 4);
        for (i, mat) in expected.iter().enumerate() {
            let d = p.dense(i);
            for r in 0..4 {
                for c in 0..4 {
                    assert!((d[(r, c)] - mat[r][c]).abs() <= 1e-15, "A_{i} ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn two_cycle() {
        let g = load_edge_list("0 1\n1 0").unwrap();
        let p = consensus_matrices(&g).unwrap();
        for d in p.matrices() {
            assert!(d.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        }
    }

    #[test]
    fn rejects_graphs_that_are_not_strongly_connected() {
        let g = load_edge_list("0 1\n1 2\n2 1").unwrap();
        assert!(matches!(consensus_matrices(&g), Err(Error::Validation(_))));
    }

    #[test]
    fn orientation_contrast() {
        let g = example_web();
        let p = consensus_matrices(&g).unwrap();
        let a = g.link_matrix().unwrap();
        for i in 0..4 {
            let c = p.dense(i);
            assert!(is_row_stochastic(&c, 1e-12));
            assert!((0..4).all(|j| c[(j, j)] > 0.0));
            assert!(is_column_stochastic(&crate::dist_single::build_ai_dense(&a, i), 1e-12));
        }
        assert!(!is_column_stochastic(&p.dense(1), 1e-6));
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let g = random_web(15, 3, 1, 1, 4).unwrap();
        let p = consensus_matrices(&g).unwrap();
        let x: Vec<f64> = (0..15).map(|i| (i * 7 % 5) as f64).collect();
        for i in 0..15 {
            let dense = crate::dense::mat_vec(&p.dense(i), &x);
            let sparse = p.apply(i, &x);
            assert!(dense.iter().zip(&sparse).all(|(a, b)| (a - b).abs() < 1e-14));
        }
        assert!(average_is_primitive_structure(&g, &p));
    }

    #[test]
    fn constant_start_is_immediate() {
        let p = consensus_matrices(&example_web()).unwrap();
        let run = simulate_consensus(&p, &[0.3; 4], 1, 100, 1, 1e-8).unwrap();
        assert_eq!(run.trace.stopped_at, Some(0));
        assert_eq!(run.trace.last().err_linf, 0.0);
    }

    #[test]
    fn reaches_agreement_inside_initial_range() {
        let p = consensus_matrices(&example_web()).unwrap();
        for seed in 0..5 {
            let run = simulate_consensus(&p, &[1.0, 0.0, 0.0, 0.0], seed, 100_000, 10, 1e-8).unwrap();
            assert!(run.trace.stopped_at.is_some());
            assert!(run.range_contracted);
            assert!(run.trace.final_x.iter().all(|&v| (0.0..=1.0).contains(&v)));
            assert!(run.trace.last().err_linf <= 1e-8);
        }
    }

    proptest::proptest! {
        #[test]
        fn every_pattern_keeps_values_in_range(
            seed in 0u64..300,
            n in 2usize..12,
            raw in proptest::collection::vec(-5.0f64..5.0, 12),
            agent in 0usize..12,
        ) {
            let g = random_web(n, seed, 0, 1, n - 1).unwrap();
            let Ok(pattern) = consensus_matrices(&g) else {
                return Ok(());
            };
            let x = &raw[..n];
            let (lo, hi) = x.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
            let y = pattern.apply(agent % n, x);
            proptest::prop_assert!(y.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
            proptest::prop_assert!(is_row_stochastic(&pattern.dense(agent % n), 1e-12));
        }
    }
}
