//! Push-and-pull search for constrained multi-objective optimization on top
//! of a decomposition (MOEA/D style) engine, with the baselines, metrics and
//! statistics needed to compare them.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod engine;
pub mod error;
pub mod harness;
pub mod individual;
pub mod metrics;
pub mod problems;
pub mod selection;
pub mod stats;
pub mod variation;

pub use error::{Error, Result};
