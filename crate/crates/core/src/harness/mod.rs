//! Monte Carlo driving, reference runs, checks and the command-line front end.

pub mod cli;
pub mod io;
pub mod verify;

use rayon::prelude::*;
use serde::Serialize;

use crate::dist_simul::{mhat_simul, simulate_simul};
use crate::dist_single::{mhat_single, simulate_single};
use crate::ergodicity::ms_error_bound;
use crate::sim::{InitialState, RunConfig, SchemeParams, SimTrace};
use crate::spectral::pagerank;
use crate::termination::{run_algorithm1, TerminationParams};
use crate::webgraph::{l2_sq_dist, random_web, LinkMatrix, RankVector};
use crate::{Error, Result};

/// Tolerance of the reference PageRank solve that error columns use.
pub const REFERENCE_TOL: f64 = 1e-12;

pub fn reference_pagerank(a: &LinkMatrix, m: f64) -> Result<RankVector> {
    Ok(pagerank(a, m, REFERENCE_TOL)?.x_star)
}

/// Schemes whose time average is tracked in mean square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum McScheme {
    Single,
    Simul,
}

impl McScheme {
    pub fn mhat(self, p: &SchemeParams, n: usize) -> f64 {
        match self {
            McScheme::Single => mhat_single(p.m, n),
            McScheme::Simul => mhat_simul(p.m, p.alpha),
        }
    }

    pub fn simulate(self, a: &LinkMatrix, x_star: &[f64], p: &SchemeParams, cfg: &RunConfig) -> Result<SimTrace> {
        match self {
            McScheme::Single => simulate_single(a, x_star, p, cfg),
            McScheme::Simul => simulate_simul(a, x_star, p, cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub scheme: McScheme,
    pub ks: Vec<u64>,
    /// Empirical `E ||y(k) - x*||^2` at each sampled `k`.
    pub mean_sq: Vec<f64>,
    pub ms_bound: Vec<f64>,
    pub runs: usize,
    pub seed_base: u64,
}

impl McSummary {
    pub fn at(&self, k: u64) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.mean_sq[i])
    }

    /// Sampled steps where the empirical mean exceeds the bound.
    pub fn bound_violations(&self) -> Vec<u64> {
        self.ks
            .iter()
            .zip(self.mean_sq.iter().zip(&self.ms_bound))
            .filter(|(_, (e, b))| e > b)
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Mean-square error over `runs` independent runs. Run `r` uses stream
/// `p.stream + r` of seed `p.seed`.
pub fn mc_mean_square(
    scheme: McScheme,
    a: &LinkMatrix,
    x_star: &[f64],
    p: &SchemeParams,
    runs: usize,
    cfg: &RunConfig,
) -> Result<McSummary> {
    let streams: Vec<u64> = (0..runs as u64).map(|r| p.stream + r).collect();
    mc_mean_square_streams(scheme, a, x_star, p, &streams, cfg)
}

/// As [`mc_mean_square`] with explicit stream indices. Runs execute in
/// parallel; the reduction is in stream-list order, so the result does not
/// depend on the thread count.
pub fn mc_mean_square_streams(
    scheme: McScheme,
    a: &LinkMatrix,
    x_star: &[f64],
    p: &SchemeParams,
    streams: &[u64],
    cfg: &RunConfig,
) -> Result<McSummary> {
    if streams.len() < 2 {
        return Err(Error::validation(format!("at least two runs are required, got {}", streams.len())));
    }
    let run_cfg = RunConfig { keep_states: true, ..cfg.clone() };
    let per_run: Vec<Vec<(u64, f64)>> = streams
        .par_iter()
        .map(|&s| {
            let trace = scheme.simulate(a, x_star, &p.with_stream(s), &run_cfg)?;
            Ok(trace.states.iter().map(|st| (st.k, l2_sq_dist(&st.y, x_star))).collect())
        })
        .collect::<Result<_>>()?;
    let ks: Vec<u64> = per_run[0].iter().map(|e| e.0).collect();
    let mut sums = vec![0.0; ks.len()];
    for run in &per_run {
        for (acc, &(_, e)) in sums.iter_mut().zip(run) {
            *acc += e;
        }
    }
    let runs = streams.len();
    let mhat = scheme.mhat(p, a.dim());
    Ok(McSummary {
        scheme,
        ms_bound: ks.iter().map(|&k| ms_error_bound(mhat, k)).collect(),
        mean_sq: sums.into_iter().map(|s| s / runs as f64).collect(),
        ks,
        runs,
        seed_base: p.seed,
    })
}

/// Parameters of the large terminating run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledConfig {
    pub n: usize,
    pub hubs: usize,
    pub min_deg: usize,
    pub max_deg: usize,
    pub m: f64,
    pub alpha: f64,
    pub delta: f64,
    pub ns: usize,
    pub steps: u64,
    pub sample_every: u64,
}

impl Default for ScaledConfig {
    fn default() -> Self {
        ScaledConfig {
            n: 1000,
            hubs: 10,
            min_deg: 2,
            max_deg: 333,
            m: crate::DEFAULT_DAMPING,
            alpha: 0.01,
            delta: 0.01,
            ns: 800,
            steps: 8000,
            sample_every: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledReport {
    pub config: ScaledConfig,
    pub trace: SimTrace,
    pub sum_y: f64,
    pub linf_at_500: f64,
    pub linf_final: f64,
    pub terminated: usize,
}

/// Terminating run on a random web with hubs, started from a random
/// probability vector. The graph and the run both derive from `seed_base`.
pub fn scaled_experiment(seed_base: u64, cfg: &ScaledConfig) -> Result<ScaledReport> {
    let g = random_web(cfg.n, seed_base, cfg.hubs, cfg.min_deg, cfg.max_deg)?;
    let a = g.link_matrix()?;
    let x_star = reference_pagerank(&a, cfg.m)?;
    let p = SchemeParams::new(cfg.m, cfg.alpha, seed_base);
    let tp = TerminationParams::new(cfg.delta, cfg.ns)?;
    let run = RunConfig::new(cfg.steps, cfg.sample_every).initial(InitialState::Random);
    let trace = run_algorithm1(&a, &x_star, &p, &tp, &run)?;
    let linf_at = |k| trace.samples.iter().rfind(|s| s.k <= k).map_or(f64::NAN, |s| s.err_linf);
    Ok(ScaledReport {
        config: cfg.clone(),
        sum_y: trace.final_y.iter().sum(),
        linf_at_500: linf_at(500),
        linf_final: trace.last().err_linf,
        terminated: trace.term_times.as_ref().map_or(0, |t| t.iter().flatten().count()),
        trace,
    })
}
