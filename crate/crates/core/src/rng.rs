//! Deterministic random streams.
//!
//! Every simulation run draws from a ChaCha8 generator keyed by
//! `(seed, stream)`. Monte Carlo run `r` uses stream `r`, so runs are
//! independent, reproducible and insensitive to execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform page index in `0..n`.
pub fn uniform_page<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.random_range(0..n)
}

/// Fills `flags` with independent Bernoulli(`alpha`) draws, one variate per
/// page in page-id order.
pub fn bernoulli_pattern<R: Rng + ?Sized>(rng: &mut R, alpha: f64, flags: &mut [bool]) {
    for flag in flags.iter_mut() {
        *flag = rng.random::<f64>() < alpha;
    }
}
