//! Constraint graphs with linear structure and the machinery built on top of
//! them: finite-field subspace algebra, de Bruijn permutation routing and
//! embedding, subspace direct-product tests, derandomized parallel repetition,
//! and decoding-graph pipelines.
//!
//! Everything randomized takes an explicit seeded stream, so experiments are
//! reproducible bit-for-bit. Exact enumeration oracles back the Monte Carlo
//! estimators wherever the parameter space is small enough to enumerate.

pub mod budget;
pub mod debruijn;
pub mod decoding;
pub mod derand;
pub mod dp;
pub mod error;
pub mod field;
pub mod graph;
pub mod rng;
pub mod space;
pub mod stats;
pub mod subspace_stats;

pub use budget::Budget;
pub use error::Error;
pub use field::Field;
pub use space::{EdgeSpaceView, Subspace, Vector};
pub use stats::ExperimentReport;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
