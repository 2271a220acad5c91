//! Randomized distributed PageRank.
//!
//! Pages hold their own value and update it by exchanging values with
//! linked pages at random times. The crate simulates several such schemes
//! on a shared, immutable [`LinkMatrix`]:
//!
//! - [`dist_single`]: one uniformly drawn page initiates an update per step;
//!   the time average of the state converges in mean square to PageRank.
//! - [`dist_simul`]: every page initiates independently with probability α.
//! - [`termination`]: pages freeze their estimate once it is stable.
//! - [`async_iter`]: randomized asynchronous power iteration.
//! - [`consensus`]: randomized averaging over the same communication pattern.
//!
//! [`spectral`] and [`ergodicity`] provide the centralized references and
//! the dense matrix checks used to validate the schemes, and [`harness`]
//! drives Monte Carlo runs and writes traces.

pub mod async_iter;
pub mod consensus;
pub mod dense;
pub mod dist_simul;
pub mod dist_single;
pub mod ergodicity;
mod error;
pub mod harness;
pub mod rng;
pub mod sim;
pub mod spectral;
pub mod termination;
pub mod webgraph;

pub use error::{Error, Result};
pub use sim::{RunConfig, SchemeParams, SimState, SimTrace, TraceSample};
pub use spectral::{power_method, PowerResult};
pub use webgraph::{LinkMatrix, RankVector, WebGraph};

/// Damping value used throughout the literature on PageRank.
pub const DEFAULT_DAMPING: f64 = 0.15;
