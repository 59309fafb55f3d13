//! Rate-distortion regions for cascade and triangular source coding with side
//! information available at the encoder and the first user.
//!
//! * [`prob`]: finite pmfs, entropies and information measures.
//! * [`gaussian`]: closed-form quadratic-Gaussian regions and a grid oracle.
//! * [`discrete`]: finite-alphabet region evaluators, a boundary optimizer and
//!   a lattice oracle.
//! * [`geometry`]: dominance and Pareto frontiers.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod gaussian;
pub mod geometry;
pub mod prob;

pub use error::{Error, Result};
