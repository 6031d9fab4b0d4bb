//! Simulation laboratory for subcritical bond percolation on uniform
//! attachment graphs.
//!
//! Vertex `n + 1` arrives with `m` out-edges to uniformly chosen earlier
//! vertices, and each edge is kept independently with probability `pi`.
//! Below `pi_c(m) = 1 / (2 (m + sqrt(m (m - 1))))` every component is small,
//! yet the component of a fixed early vertex grows like `n^alpha(pi)`.
//!
//! - [`analytic`]: closed forms for thresholds, exponents and fixed points.
//! - [`graph`]: the percolated graph grown one vertex at a time.
//! - [`continuous_time`]: Yule-clock embedding and its supermartingale.
//! - [`mbrw`]: the killed branching random walk describing local limits.
//! - [`oracle`]: exact enumeration for graphs of up to six vertices.
//! - [`experiments`]: seeded ensembles that write CSV and JSON artifacts.

pub mod analytic;
pub mod continuous_time;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod mbrw;
pub mod oracle;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
