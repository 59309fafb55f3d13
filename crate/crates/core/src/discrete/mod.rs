//! Finite-alphabet cascade, triangular and multiuser regions.
//!
//! Sources are two-variable [`JointPmf`](crate::prob::JointPmf)s over
//! `(x, y)`. Rates are in bits and distortions in the units of the supplied
//! [`DistortionMatrix`](crate::prob::DistortionMatrix).

mod channel;
mod evaluate;
mod lattice;
mod optimizer;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RateVector;

pub use channel::{CascadeChannel, MultiuserChannel, Stochastic, TriangularChannel};
pub use evaluate::{
    cascade_rates, coordination_rates, empirical_coordination_distance, multiuser_rates,
    triangular_rates, triangular_rates_of_joint,
};
pub use lattice::{brute_force_boundary, simplex_lattice, triangular_inner_search, MAX_GRID_PARAMETERS};
pub use optimizer::{
    minimize_weighted_sum, trace_boundary, InnerMethod, OptimizedPoint, OptimizerOptions,
    DEFAULT_LAMBDAS,
};

/// A rate vector with the distortions achieved alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub rates: Vec<f64>,
    pub distortions: Vec<f64>,
}

impl RatePoint {
    pub fn new(rates: Vec<f64>, distortions: Vec<f64>) -> Result<Self> {
        if let Some(r) = rates.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::InvalidArgument(format!("rate {r} is not a finite nonnegative value")));
        }
        if let Some(d) = distortions.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument(format!("distortion {d} is not finite")));
        }
        Ok(Self { rates, distortions })
    }

    pub fn rate_vector(&self) -> RateVector {
        RateVector::new(self.rates.clone()).expect("rates are finite by construction")
    }
}

/// Keep the points whose rate vectors are Pareto optimal, sorted by rates.
pub fn pareto_points(points: &[RatePoint]) -> Result<Vec<RatePoint>> {
    let vectors: Vec<RateVector> = points.iter().map(RatePoint::rate_vector).collect();
    Ok(crate::geometry::pareto_indices(&vectors)?
        .into_iter()
        .map(|i| points[i].clone())
        .collect())
}
