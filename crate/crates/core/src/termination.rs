//! Simultaneous updates with termination.
//!
//! A page whose time average has stayed within a relative band `δ` over the
//! last `N_s` steps freezes: its state and time average are fixed to the
//! current average and it stops iterating. Frozen values stay readable, so
//! the remaining pages follow
//!
//! ```text
//! x_N(k+1) = (1 - m̂) [A_p x(k)]_N + m̂ / n,   x_C = y_C,
//! ```
//!
//! which is no longer stochastic: `Σ y` drifts once pages freeze.

use std::collections::VecDeque;

use crate::dense::{one_norm, select, Dense};
use crate::dist_simul::{average_matrix_simul_closed, mhat_simul, pattern_product, UpdatePattern};
use crate::rng::stream_rng;
use crate::sim::{Recorder, RunConfig, SchemeParams, SimState, SimTrace, TraceMeta};
use crate::webgraph::{l1_dist, LinkMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TerminationParams {
    /// Relative error level `δ`.
    pub delta: f64,
    /// Stability window `N_s`.
    pub ns: usize,
}

impl TerminationParams {
    pub fn new(delta: f64, ns: usize) -> Result<Self> {
        let tp = TerminationParams { delta, ns };
        tp.validate()?;
        Ok(tp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::validation(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.ns == 0 {
            return Err(Error::validation("stability window ns must be at least 1"));
        }
        Ok(())
    }
}

/// The last `N_s` time-average values of one page.
///
/// Besides the values themselves it keeps monotone deques of the window
/// minimum and maximum, so the stability test is `O(1)`.
#[derive(Debug, Clone)]
pub struct History {
    cap: usize,
    pushed: u64,
    values: VecDeque<f64>,
    maxq: VecDeque<(u64, f64)>,
    minq: VecDeque<(u64, f64)>,
}

impl History {
    pub fn new(cap: usize) -> Self {
        History {
            cap,
            pushed: 0,
            values: VecDeque::with_capacity(cap + 1),
            maxq: VecDeque::new(),
            minq: VecDeque::new(),
        }
    }

    pub fn push(&mut self, v: f64) {
        let idx = self.pushed;
        self.pushed += 1;
        self.values.push_back(v);
        if self.values.len() > self.cap {
            self.values.pop_front();
        }
        let oldest = self.pushed.saturating_sub(self.cap as u64);
        while self.maxq.back().is_some_and(|&(_, b)| b <= v) {
            self.maxq.pop_back();
        }
        self.maxq.push_back((idx, v));
        while self.maxq.front().is_some_and(|&(i, _)| i < oldest) {
            self.maxq.pop_front();
        }
        while self.minq.back().is_some_and(|&(_, b)| b >= v) {
            self.minq.pop_back();
        }
        self.minq.push_back((idx, v));
        while self.minq.front().is_some_and(|&(i, _)| i < oldest) {
            self.minq.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Oldest first.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.maxq.front().map(|&(_, v)| v)
    }

    pub fn min(&self) -> Option<f64> {
        self.minq.front().map(|&(_, v)| v)
    }
}

/// `|y_now - y(k-ℓ)| <= δ y_now` for every `ℓ = 1..N_s`; false until the
/// window holds `N_s` values.
pub fn check_converged(history: &History, y_now: f64, tp: &TerminationParams) -> bool {
    if history.len() < tp.ns {
        return false;
    }
    let band = tp.delta * y_now;
    match (history.min(), history.max()) {
        (Some(lo), Some(hi)) => y_now - lo <= band && hi - y_now <= band,
        _ => false,
    }
}

/// Per-run state of the terminating scheme.
#[derive(Debug, Clone)]
pub struct TermState {
    pub base: SimState,
    pub history: Vec<History>,
    /// Frozen value of each page in `C`, `None` for pages in `N`.
    pub frozen: Vec<Option<f64>>,
    pub term_time: Vec<Option<u64>>,
}

impl TermState {
    pub fn new(x0: Vec<f64>, tp: &TerminationParams) -> Self {
        let n = x0.len();
        let mut history: Vec<History> = (0..n).map(|_| History::new(tp.ns)).collect();
        for (h, &y) in history.iter_mut().zip(&x0) {
            h.push(y);
        }
        TermState { base: SimState::new(x0), history, frozen: vec![None; n], term_time: vec![None; n] }
    }

    /// Freezes `page` at `value` as of the current step.
    pub fn freeze(&mut self, page: usize, value: f64) {
        if self.frozen[page].is_some() {
            return;
        }
        self.frozen[page] = Some(value);
        self.base.x[page] = value;
        self.base.y[page] = value;
        self.term_time[page] = Some(self.base.k);
    }

    pub fn frozen_count(&self) -> usize {
        self.frozen.iter().filter(|f| f.is_some()).count()
    }

    pub fn all_frozen(&self) -> bool {
        self.frozen.iter().all(Option::is_some)
    }

    /// Freezes every page whose time average passes the stability test and
    /// returns how many froze. Pages qualifying together freeze together.
    pub fn check_and_freeze(&mut self, tp: &TerminationParams) -> usize {
        let ready: Vec<usize> = (0..self.frozen.len())
            .filter(|&i| self.frozen[i].is_none() && check_converged(&self.history[i], self.base.y[i], tp))
            .collect();
        for &i in &ready {
            let v = self.base.y[i];
            self.freeze(i, v);
        }
        for i in 0..self.frozen.len() {
            if self.frozen[i].is_none() {
                let y = self.base.y[i];
                self.history[i].push(y);
            }
        }
        ready.len()
    }
}

/// One step of the partitioned recursion. Only pages in `N` change.
pub fn step_terminated(s: &mut TermState, a: &LinkMatrix, p: &UpdatePattern, mhat: f64) {
    if s.all_frozen() {
        s.base.k += 1;
        return;
    }
    let n = a.dim();
    let teleport = mhat / n as f64;
    let ax = pattern_product(a, p, &s.base.x);
    let w = (s.base.k + 1) as f64;
    for (i, &axi) in ax.iter().enumerate() {
        if s.frozen[i].is_none() {
            let xi = (1.0 - mhat) * axi + teleport;
            s.base.x[i] = xi;
            s.base.y[i] = (w * s.base.y[i] + xi) / (w + 1.0);
        }
    }
    s.base.k += 1;
}

fn partition(frozen: &[Option<f64>]) -> (Vec<usize>, Vec<usize>) {
    (0..frozen.len()).partition(|&i| frozen[i].is_some())
}

/// Dense `Â_NN` with `Â = (1 - m̂) Ā` and `Ā` the average pattern matrix.
pub fn ahat_nn_dense(a: &LinkMatrix, m: f64, alpha: f64, frozen: &[Option<f64>]) -> Dense {
    let (_, nset) = partition(frozen);
    let ahat = average_matrix_simul_closed(a, alpha) * (1.0 - mhat_simul(m, alpha));
    select(&ahat, &nset, &nset)
}

const EQUILIBRIUM_TOL: f64 = 1e-12;

/// Equilibrium `x̃_N = (I - Â_NN)^{-1} (Â_NC y_C + (m̂/n) 1)` of the averaged
/// partitioned recursion, by fixed-point iteration. The result is indexed
/// over `N` in increasing page order.
pub fn equilibrium_tilde(a: &LinkMatrix, m: f64, alpha: f64, frozen: &[Option<f64>]) -> Result<Vec<f64>> {
    SchemeParams::new(m, alpha, 0).validate()?;
    let n = a.dim();
    if frozen.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: frozen.len() });
    }
    let (_, nset) = partition(frozen);
    if nset.is_empty() {
        return Err(Error::validation("equilibrium needs at least one non-frozen page"));
    }
    let mhat = mhat_simul(m, alpha);
    let c = 1.0 - (1.0 - alpha) * (1.0 - alpha);
    let teleport = mhat / n as f64;
    let cap = 10_000usize.max((80.0 / mhat).ceil() as usize);

    let mut full: Vec<f64> = frozen.iter().map(|f| f.unwrap_or(0.0)).collect();
    let mut z: Vec<f64> = vec![0.0; nset.len()];
    let mut step = f64::INFINITY;
    for _ in 0..cap {
        let az = a.mul_vec(&full);
        let next: Vec<f64> = nset
            .iter()
            .map(|&i| (1.0 - mhat) * (c * az[i] + (1.0 - c) * full[i]) + teleport)
            .collect();
        step = l1_dist(&next, &z);
        for (&i, &v) in nset.iter().zip(&next) {
            full[i] = v;
        }
        z = next;
        if step < EQUILIBRIUM_TOL {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence { iterations: cap, last_step: step, last: z })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NeumannReport {
    /// `||Â_NN||_1`.
    pub norm1: f64,
    pub limit: f64,
    pub nonnegative: bool,
    pub nondecreasing: bool,
}

impl NeumannReport {
    pub fn holds(&self) -> bool {
        self.norm1 <= self.limit + 1e-12 && self.nonnegative && self.nondecreasing
    }
}

/// Checks `||Â_NN||_1 <= 1 - m̂` and that the partial sums `Σ_{j<terms} Â_NN^j`
/// are entrywise nonnegative and nondecreasing.
pub fn neumann_check(a: &LinkMatrix, m: f64, alpha: f64, frozen: &[Option<f64>], terms: usize) -> NeumannReport {
    let block = ahat_nn_dense(a, m, alpha, frozen);
    let k = block.nrows();
    let mut power = Dense::identity(k, k);
    let mut sum = Dense::zeros(k, k);
    let mut nonnegative = true;
    let mut nondecreasing = true;
    for _ in 0..terms {
        let next = &sum + &power;
        nonnegative &= next.iter().all(|&v| v >= 0.0);
        nondecreasing &= next.iter().zip(sum.iter()).all(|(n, s)| n >= s);
        sum = next;
        power = &block * power;
    }
    NeumannReport { norm1: one_norm(&block), limit: 1.0 - mhat_simul(m, alpha), nonnegative, nondecreasing }
}

/// Runs the terminating scheme until every page is frozen or `cfg.steps`
/// steps have elapsed.
///
/// Frozen pages keep drawing their initiation flag, and a flagged frozen
/// page still pushes its frozen value to its non-frozen successors, so
/// exactly `n` variates are drawn every step.
pub fn run_algorithm1(
    a: &LinkMatrix,
    x_star: &[f64],
    p: &SchemeParams,
    tp: &TerminationParams,
    cfg: &RunConfig,
) -> Result<SimTrace> {
    p.validate()?;
    tp.validate()?;
    let n = a.dim();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_star.len() });
    }
    let mhat = mhat_simul(p.m, p.alpha);
    let mut rng = stream_rng(p.seed, p.stream);
    let mut state = TermState::new(cfg.initial.materialize(n, &mut rng)?, tp);
    let mut rec = Recorder::new(x_star, cfg);
    rec.record(0, &state.base.y, &state.base.x, &state.base.y);
    let mut pattern = UpdatePattern::none(n);
    let mut stopped_at = None;
    for _ in 0..cfg.steps {
        pattern.resample(&mut rng, p.alpha);
        step_terminated(&mut state, a, &pattern, mhat);
        state.check_and_freeze(tp);
        let k = state.base.k;
        if rec.due(k) {
            rec.record(k, &state.base.y, &state.base.x, &state.base.y);
        }
        if state.all_frozen() {
            stopped_at = Some(k);
            break;
        }
    }
    let k = state.base.k;
    rec.record(k, &state.base.y, &state.base.x, &state.base.y);
    let meta = TraceMeta {
        scheme: "terminate".into(),
        n,
        params: *p,
        mhat: Some(mhat),
        steps: cfg.steps,
        sample_every: cfg.sample_every,
    };
    let mut trace = rec.finish(meta, stopped_at, state.base.x, state.base.y);
    trace.term_times = Some(state.term_time);
    Ok(trace)
}
