//! A laboratory for Bernoulli bond percolation on finite transitive graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: complete graphs, cycles, hypercubes, tori, Cartesian and
//!   molecular products, molecular witnesses and the spectral radius.
//! - [`percolation`]: seeded sampling, cluster reports, pivotality and
//!   Monte Carlo summaries.
//! - [`exact`]: exhaustive enumeration over all `2^|E|` configurations of a
//!   small graph, including the measure conditioned on the root cluster
//!   being small.
//! - [`coupling`]: the smallest-index exploration process and the
//!   approximately monotone coupling it induces.
//! - [`estimators`]: threshold estimates, bounds and finite-size checks.
//! - [`checks`]: the acceptance batteries, shared by the CLI and the tests.
//!
//! Runnable walkthroughs live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod checks;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod graph;
pub mod percolation;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
