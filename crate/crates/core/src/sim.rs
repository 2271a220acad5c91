//! State, parameters and traces shared by every simulated scheme.

use serde::{Deserialize, Serialize};

use crate::rng::SimRng;
use crate::webgraph::{l1_dist, linf_dist, RankVector};
use crate::{Error, Result, DEFAULT_DAMPING};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Damping `m` of the Google matrix.
    pub m: f64,
    /// Per-page, per-step update probability (ignored by the single-update scheme).
    pub alpha: f64,
    pub seed: u64,
    /// Random stream index; Monte Carlo run `r` uses stream `r`.
    pub stream: u64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams { m: DEFAULT_DAMPING, alpha: 1.0, seed: 0, stream: 0 }
    }
}

impl SchemeParams {
    pub fn new(m: f64, alpha: f64, seed: u64) -> Self {
        SchemeParams { m, alpha, seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        SchemeParams { stream, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        validate_damping(self.m)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::validation(format!(
                "update probability alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_damping(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::validation(format!("damping m must lie in (0, 1), got {m}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub enum InitialState {
    #[default]
    Uniform,
    /// Random probability vector drawn from the run's own stream.
    Random,
    Given(Vec<f64>),
}

impl InitialState {
    pub(crate) fn materialize(&self, n: usize, rng: &mut SimRng) -> Result<Vec<f64>> {
        match self {
            InitialState::Uniform => Ok(RankVector::uniform(n).into_inner()),
            InitialState::Random => Ok(RankVector::random_probability(n, rng).into_inner()),
            InitialState::Given(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: v.len() });
                }
                Ok(RankVector::new(v.clone())?.into_inner())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Horizon `K`: number of steps to run.
    pub steps: u64,
    pub sample_every: u64,
    /// Keep full `x` and `y` at each sampled step.
    pub keep_states: bool,
    pub initial: InitialState,
}

impl RunConfig {
    pub fn new(steps: u64, sample_every: u64) -> Self {
        RunConfig { steps, sample_every: sample_every.max(1), keep_states: false, initial: InitialState::Uniform }
    }

    pub fn keep_states(mut self) -> Self {
        self.keep_states = true;
        self
    }

    pub fn initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }
}

/// Per-run state: step counter, current state `x(k)` and running time
/// average `y(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub k: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SimState {
    pub fn new(x0: Vec<f64>) -> Self {
        SimState { k: 0, y: x0.clone(), x: x0 }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Installs `x(k+1)` and folds it into the running average
    /// `y(k+1) = ((k+1) y(k) + x(k+1)) / (k+2)`.
    pub fn advance(&mut self, next: Vec<f64>) {
        self.x = next;
        let w = (self.k + 1) as f64;
        let denom = w + 1.0;
        for (y, &x) in self.y.iter_mut().zip(&self.x) {
            *y = (w * *y + x) / denom;
        }
        self.k += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub k: u64,
    pub err_l1: f64,
    pub err_linf: f64,
    pub sum_y: f64,
    pub ms_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSample {
    pub k: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub scheme: String,
    pub n: usize,
    pub params: SchemeParams,
    /// Rescaled damping used by the scheme, when it has one.
    pub mhat: Option<f64>,
    pub steps: u64,
    pub sample_every: u64,
}

/// Sampled trajectory of one run.
///
/// For the PageRank schemes the error columns compare the tracked estimate
/// (the time average `y`, or the raw state for asynchronous iteration) with
/// the reference PageRank vector. For consensus runs `err_linf` is the spread
/// `max x - min x` and `err_l1` is `sum |x_i - mean(x)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub meta: TraceMeta,
    pub samples: Vec<TraceSample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateSample>,
    /// Per-page termination step, for runs with update termination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_times: Option<Vec<Option<u64>>>,
    /// Step at which the run met its stopping criterion, if it has one.
    pub stopped_at: Option<u64>,
    pub final_x: Vec<f64>,
    pub final_y: Vec<f64>,
}

impl SimTrace {
    pub fn last(&self) -> &TraceSample {
        self.samples.last().expect("traces always hold the k = 0 sample")
    }

    pub fn sample_at(&self, k: u64) -> Option<&TraceSample> {
        self.samples.iter().find(|s| s.k == k)
    }
}

/// Builds a trace by sampling metrics from a running state.
pub(crate) struct Recorder<'a> {
    reference: &'a [f64],
    sample_every: u64,
    keep_states: bool,
    ms_bound: Option<Box<dyn Fn(u64) -> f64 + 'a>>,
    samples: Vec<TraceSample>,
    states: Vec<StateSample>,
}

impl<'a> Recorder<'a> {
    pub fn new(reference: &'a [f64], cfg: &RunConfig) -> Self {
        Recorder {
            reference,
            sample_every: cfg.sample_every.max(1),
            keep_states: cfg.keep_states,
            ms_bound: None,
            samples: Vec::new(),
            states: Vec::new(),
        }
    }

    pub fn with_ms_bound(mut self, f: impl Fn(u64) -> f64 + 'a) -> Self {
        self.ms_bound = Some(Box::new(f));
        self
    }

    pub fn due(&self, k: u64) -> bool {
        k.is_multiple_of(self.sample_every)
    }

    /// Records a sample of `estimate` (the tracked vector) at step `k`.
    pub fn record(&mut self, k: u64, estimate: &[f64], x: &[f64], y: &[f64]) {
        if self.samples.last().is_some_and(|s| s.k >= k) {
            return;
        }
        self.samples.push(TraceSample {
            k,
            err_l1: l1_dist(estimate, self.reference),
            err_linf: linf_dist(estimate, self.reference),
            sum_y: estimate.iter().sum(),
            ms_bound: self.ms_bound.as_ref().map(|f| f(k)),
        });
        if self.keep_states {
            self.states.push(StateSample { k, x: x.to_vec(), y: y.to_vec() });
        }
    }

    pub fn push_raw(&mut self, sample: TraceSample, x: &[f64], y: &[f64]) {
        if self.samples.last().is_some_and(|s| s.k >= sample.k) {
            return;
        }
        self.samples.push(sample);
        if self.keep_states {
            self.states.push(StateSample { k: sample.k, x: x.to_vec(), y: y.to_vec() });
        }
    }

    pub fn finish(self, meta: TraceMeta, stopped_at: Option<u64>, x: Vec<f64>, y: Vec<f64>) -> SimTrace {
        SimTrace {
            meta,
            samples: self.samples,
            states: self.states,
            term_times: None,
            stopped_at,
            final_x: x,
            final_y: y,
        }
    }
}
