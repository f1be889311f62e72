//! Finite-tolerance recurrence analysis for finite metric models of
//! dynamical systems.
//!
//! Everything runs on a [`FiniteSystem`]: a self-map of the indices of a
//! [`FiniteMetricSpace`]. Chains are walks in the weighted error graph
//! `weight(u, v) = d(f(u), v)`; from there the crate computes chain
//! recurrent, strong chain recurrent, Mañé, generalized-recurrent
//! (outer approximation over a metric family) and nonwandering sets at a
//! fixed tolerance, together with checks of how those sets behave under
//! products.

pub mod catalog;
pub mod chain_engine;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod metric_space;
pub mod nonwandering;
pub mod numtheory;
pub mod recurrence;

mod par;

pub use dynamics::{FiniteSystem, GmSystem};
pub use error::{Error, Result};
pub use metric_space::{FiniteMetricSpace, MetricFamily, ProductSpace};

/// Default cap on the number of points in a product space.
pub const DEFAULT_CAPACITY: usize = 2_000_000;

/// Capacity cap for product constructions and layered searches.
///
/// Read from `RECLAB_CAP` when set to a positive integer.
pub fn capacity_cap() -> usize {
    std::env::var("RECLAB_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_CAPACITY)
}

/// Version string recorded in provenance blocks.
pub const ALGORITHM_VERSION: &str = concat!("reclab-core ", env!("CARGO_PKG_VERSION"));
