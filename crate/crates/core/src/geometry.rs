//! Rate-vector dominance and Pareto frontiers.
//!
//! Coordinates are compared after snapping to a `1e-9` lattice so that values
//! differing only by rounding noise are treated as equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resolution used when comparing rate coordinates.
pub const SNAP_RESOLUTION: f64 = 1e-9;

fn snap(v: f64) -> i64 {
    // `as` saturates, which keeps huge coordinates ordered
    (v / SNAP_RESOLUTION).round() as i64
}

/// A finite vector of rates in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite rate coordinate {c}")));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn key(&self) -> Vec<i64> {
        self.0.iter().map(|&c| snap(c)).collect()
    }
}

impl TryFrom<Vec<f64>> for RateVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RateVector> for Vec<f64> {
    fn from(r: RateVector) -> Self {
        r.0
    }
}

fn key_dominates(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// `a ≺ b`: `a` is no worse in every coordinate and strictly better in one.
pub fn dominates(a: &RateVector, b: &RateVector) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare {}-vector with {}-vector",
            a.dim(),
            b.dim()
        )));
    }
    Ok(key_dominates(&a.key(), &b.key()))
}

/// Indices of the non-dominated points, one per distinct snapped value,
/// ordered lexicographically.
pub fn pareto_indices(points: &[RateVector]) -> Result<Vec<usize>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let dim = first.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "mixed dimensions {dim} and {}",
            p.dim()
        )));
    }
    let keys: Vec<Vec<i64>> = points.iter().map(RateVector::key).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    // stable sort keeps the first occurrence of duplicate keys in front
    order.sort_by(|&i, &j| keys[i].cmp(&keys[j]));
    order.dedup_by(|j, i| keys[*i] == keys[*j]);

    let kept = match dim {
        0 => order.into_iter().take(1).collect(),
        1 => order.into_iter().take(1).collect(),
        2 => {
            let mut best = i64::MAX;
            let mut out = Vec::new();
            for i in order {
                if keys[i][1] < best {
                    best = keys[i][1];
                    out.push(i);
                }
            }
            out
        }
        3 => frontier_3d(&keys, order),
        _ => {
            // any dominator precedes its victim in lexicographic order
            let mut out: Vec<usize> = Vec::new();
            for i in order {
                if !out.iter().any(|&k| key_dominates(&keys[k], &keys[i])) {
                    out.push(i);
                }
            }
            out
        }
    };
    Ok(kept)
}

/// Sweep in lexicographic order keeping a (y, z) staircase of kept points.
fn frontier_3d(keys: &[Vec<i64>], order: Vec<usize>) -> Vec<usize> {
    // y -> z, z strictly decreasing as y increases
    let mut stairs: BTreeMap<i64, i64> = BTreeMap::new();
    let mut out = Vec::new();
    for i in order {
        let (y, z) = (keys[i][1], keys[i][2]);
        let covered = stairs
            .range(..=y)
            .next_back()
            .is_some_and(|(_, &sz)| sz <= z);
        if covered {
            continue;
        }
        out.push(i);
        let stale: Vec<i64> = stairs
            .range(y..)
            .take_while(|(_, &sz)| sz >= z)
            .map(|(&sy, _)| sy)
            .collect();
        for sy in stale {
            stairs.remove(&sy);
        }
        stairs.insert(y, z);
    }
    out
}

/// The non-dominated subset of `points`, duplicates collapsed, sorted
/// lexicographically.
pub fn pareto_frontier(points: &[RateVector]) -> Result<Vec<RateVector>> {
    Ok(pareto_indices(points)?
        .into_iter()
        .map(|i| points[i].clone())
        .collect())
}

/// One sample of a boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub parameter: f64,
    pub rates: RateVector,
    pub label: String,
}

/// Boundary samples ordered by a strictly increasing parameter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionCurve {
    points: Vec<CurvePoint>,
}

impl RegionCurve {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, parameter: f64, rates: RateVector, label: impl Into<String>) -> Result<()> {
        if !parameter.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite curve parameter {parameter}")));
        }
        if let Some(last) = self.points.last() {
            if parameter.partial_cmp(&last.parameter) != Some(Ordering::Greater) {
                return Err(Error::InvalidArgument(format!(
                    "curve parameter {parameter} does not exceed previous {}",
                    last.parameter
                )));
            }
        }
        self.points.push(CurvePoint {
            parameter,
            rates,
            label: label.into(),
        });
        Ok(())
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Lower convex envelope of `(R₁, R₂)` pairs, read as `R₁` against `R₂`.
///
/// Time sharing between achievable points and raising either rate keep a
/// point achievable, so the envelope is convex and nonincreasing, flat to
/// the right of its minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerEnvelope {
    /// `(r2, r1)` knots, `r2` increasing and `r1` decreasing
    knots: Vec<(f64, f64)>,
}

impl LowerEnvelope {
    pub fn new(points: &[RateVector]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.dim() != 2) {
            return Err(Error::DimensionMismatch(format!("envelope needs 2-vectors, got {}", p.dim())));
        }
        let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.coords()[1], p.coords()[0])).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            if hull.last().is_some_and(|l| l.0 == p.0) {
                continue;
            }
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        if let Some(best) = hull
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
        {
            hull.truncate(best + 1);
        }
        Ok(Self { knots: hull })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Smallest `R₁` reachable with the given `R₂`; `None` left of the
    /// envelope or when it is empty.
    pub fn r1_at(&self, r2: f64) -> Option<f64> {
        let first = self.knots.first()?;
        if r2 < first.0 {
            return None;
        }
        let i = self.knots.partition_point(|k| k.0 <= r2);
        if i == self.knots.len() {
            return Some(self.knots[i - 1].1);
        }
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        Some(a.1 + (r2 - a.0) / (b.0 - a.0) * (b.1 - a.1))
    }
}
