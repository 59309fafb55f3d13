//! Brute-force maximization of `σ²_{Z₂}` over the coefficient `α`.
//!
//! For fixed `α` the two constraints on `σ²_{Z₂}` are linear, so the feasible
//! set is an interval `[L(α), U(α)]` and only `α` needs a grid.

use serde::Serialize;

use super::{r1_from_variances, GaussianCascadeInstance};
use crate::error::{Error, Result};

/// Grid over `α`, in units of `σ_X/σ_Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleGrid {
    pub half_width: f64,
    pub points: usize,
    pub refinements: usize,
    pub refine_factor: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self { half_width: 8.0, points: 4001, refinements: 2, refine_factor: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSolution {
    /// Maximizing `α`; `None` when `σ²_{Z₂}` is unbounded.
    pub alpha: Option<f64>,
    pub sigma_z2: f64,
    pub sigma_x_given_wy: f64,
    pub r1: f64,
    pub unbounded: bool,
    /// How often the initial range had to be doubled.
    pub expansions: usize,
    pub evaluations: usize,
}

const MAX_EXPANSIONS: usize = 60;
const MAX_ZOOMS: usize = 60;
const SLACK: f64 = 1e-12;

enum Scan {
    Found { best: (f64, f64), at_edge: bool },
    /// Nothing feasible; the `α` with the largest `U − L`.
    Closest(f64),
}

struct Problem {
    sx2: f64,
    sz2: f64,
    d2: f64,
    t: f64,
    /// coefficient of `α²` in the upper bound numerator
    a: f64,
}

impl Problem {
    fn upper(&self, alpha: f64) -> f64 {
        let Problem { sx2, d2, a, .. } = *self;
        (alpha * alpha * a + 2.0 * alpha * sx2 * d2 + d2 * sx2) / (sx2 - d2)
    }

    fn lower(&self, alpha: f64) -> f64 {
        let Problem { sx2, sz2, t, .. } = *self;
        ((1.0 + alpha).powi(2) * sx2 + alpha * alpha * sz2) / (t - 1.0)
    }

    fn value(&self, alpha: f64) -> Option<f64> {
        let (u, l) = (self.upper(alpha), self.lower(alpha));
        (u >= l - SLACK * l.abs().max(u.abs()).max(1.0) && u > 0.0).then_some(u)
    }

    /// Scan `center ± half` for the best feasible `(α, value)`.
    fn scan(&self, center: f64, half: f64, n: usize) -> Scan {
        let step = 2.0 * half / (n - 1) as f64;
        let mut best: Option<(f64, f64, usize)> = None;
        let mut closest = (f64::NEG_INFINITY, center);
        for i in 0..n {
            let alpha = center - half + step * i as f64;
            match self.value(alpha) {
                Some(v) if best.is_none_or(|b| v > b.1) => best = Some((alpha, v, i)),
                Some(_) => {}
                None => {
                    let gap = self.upper(alpha) - self.lower(alpha);
                    if gap > closest.0 {
                        closest = (gap, alpha);
                    }
                }
            }
        }
        match best {
            Some((alpha, v, i)) => Scan::Found { best: (alpha, v), at_edge: i == 0 || i == n - 1 },
            None => Scan::Closest(closest.1),
        }
    }
}

/// Maximize `σ²_{Z₂}` subject to the rate and distortion constraints, then
/// convert to `R₁`.
pub fn oracle_max_sigma_z2(inst: &GaussianCascadeInstance, grid: &OracleGrid) -> Result<OracleSolution> {
    if grid.points < 3 || !(grid.half_width > 0.0) || !(grid.refine_factor > 1.0) {
        return Err(Error::InvalidArgument(format!("unusable oracle grid {grid:?}")));
    }
    let sx2 = inst.sigma_x2();
    let sz2 = inst.sigma_z2();
    let d2 = inst.d2_eff();
    let t = 2f64.powf(2.0 * inst.r2());
    let sxy = inst.sigma_x_given_y();
    let y_precision = 1.0 / sxy;

    let finish = |alpha: Option<f64>, z2: f64, expansions: usize, evaluations: usize| {
        let unbounded = z2.is_infinite();
        let sxwy = 1.0 / (1.0 / z2 + y_precision);
        OracleSolution {
            alpha,
            sigma_z2: z2,
            sigma_x_given_wy: sxwy,
            r1: r1_from_variances(sxy, sxwy, inst.d1()),
            unbounded,
            expansions,
            evaluations,
        }
    };

    if d2 >= sx2 {
        return Ok(finish(None, f64::INFINITY, 0, 0));
    }
    if t <= 1.0 {
        return Err(Error::Infeasible("R2 = 0 cannot meet D2 below sigma_x2".into()));
    }
    let a = if sz2.is_infinite() { f64::NAN } else { sx2 * d2 + sz2 * d2 - sx2 * sz2 };
    if a > 0.0 && a * (t - 1.0) >= (sx2 + sz2) * (sx2 - d2) {
        return Ok(finish(None, f64::INFINITY, 0, 0));
    }
    let infeasible = || {
        Error::Infeasible(format!(
            "no alpha satisfies both constraints (R2 = {} bits, effective D2 = {d2})",
            inst.r2()
        ))
    };

    if sz2.is_infinite() {
        // α must vanish or W would carry infinite power
        let u = d2 * sx2 / (sx2 - d2);
        let l = sx2 / (t - 1.0);
        if u < l - SLACK * l.max(1.0) {
            return Err(infeasible());
        }
        return Ok(finish(Some(0.0), u, 0, 1));
    }

    let p = Problem { sx2, sz2, d2, t, a };
    let n = grid.points;
    let scale = (sx2 / sz2).sqrt();
    let mut half = grid.half_width * scale;
    let mut evaluations = 0;
    let mut expansions = 0;

    let mut incumbent = loop {
        evaluations += n;
        match p.scan(0.0, half, n) {
            Scan::Found { at_edge: true, .. } if expansions < MAX_EXPANSIONS => {
                half *= 2.0;
                expansions += 1;
            }
            Scan::Found { best, .. } => break best,
            Scan::Closest(_) if expansions < MAX_EXPANSIONS => {
                // the gap U − L is concave when the feasible set is bounded;
                // check its vertex before giving up on this range
                let b = p.a / (sx2 - d2) - (sx2 + sz2) / (t - 1.0);
                let c = 2.0 * sx2 * d2 / (sx2 - d2) - 2.0 * sx2 / (t - 1.0);
                if b < 0.0 {
                    let vertex = -c / (2.0 * b);
                    let gap = p.upper(vertex) - p.lower(vertex);
                    if gap < -SLACK * p.lower(vertex).abs().max(1.0) {
                        return Err(infeasible());
                    }
                    if vertex.abs() <= half {
                        break zoom(&p, vertex, half, n, &mut evaluations).ok_or_else(infeasible)?;
                    }
                }
                half *= 2.0;
                expansions += 1;
            }
            Scan::Closest(_) => return Err(infeasible()),
        }
    };

    let mut step = 2.0 * half / (n - 1) as f64;
    for _ in 0..grid.refinements {
        step /= grid.refine_factor;
        let h = step * (n - 1) as f64 / 2.0;
        evaluations += n;
        if let Scan::Found { best, .. } = p.scan(incumbent.0, h, n) {
            if best.1 > incumbent.1 {
                incumbent = best;
            }
        }
    }
    Ok(finish(Some(incumbent.0), incumbent.1, expansions, evaluations))
}

/// Narrow in on a nearly degenerate feasible set around `seed`.
fn zoom(p: &Problem, seed: f64, mut half: f64, n: usize, evaluations: &mut usize) -> Option<(f64, f64)> {
    if let Some(v) = p.value(seed) {
        return Some((seed, v));
    }
    let mut center = seed;
    for _ in 0..MAX_ZOOMS {
        *evaluations += n;
        match p.scan(center, half, n) {
            Scan::Found { best, .. } => return Some(best),
            Scan::Closest(closest) => center = closest,
        }
        half /= 10.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{cascade_r1, GaussianCascadeInstance};

    fn inst(d1: f64, d2: f64, r2: f64) -> GaussianCascadeInstance {
        GaussianCascadeInstance::new(1.0, 1.0, d1, d2, r2).unwrap()
    }

    #[test]
    fn matches_closed_form_in_case_a() {
        let i = inst(0.4, 0.35, 1.0);
        let o = oracle_max_sigma_z2(&i, &OracleGrid::default()).unwrap();
        assert!((o.r1 - cascade_r1(&i).unwrap().r1).abs() < 1e-4);
        assert!(!o.unbounded);
    }

    #[test]
    fn case_b_limit_maximizer() {
        let i = inst(0.4, 0.35, 6.0);
        let o = oracle_max_sigma_z2(&i, &OracleGrid::default()).unwrap();
        let alpha = o.alpha.unwrap();
        assert!((alpha - 7.0 / 6.0).abs() < 1e-3, "alpha {alpha}");
        assert!((o.sigma_z2 - 7.0 / 6.0).abs() < 1e-3);
    }

    #[test]
    fn unbounded_in_case_d() {
        let i = inst(0.4, 0.65, 1.0);
        let o = oracle_max_sigma_z2(&i, &OracleGrid::default()).unwrap();
        assert!(o.unbounded && o.sigma_z2.is_infinite());
        assert_eq!(o.sigma_x_given_wy, 0.5);
        assert!((o.r1 - 0.5 * (0.5f64 / 0.4).log2()).abs() < 1e-12);
    }

    #[test]
    fn infeasible_below_threshold() {
        assert!(matches!(
            oracle_max_sigma_z2(&inst(0.4, 0.35, 0.5), &OracleGrid::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn exact_feasibility_boundary_is_found() {
        let r2 = 0.5 * (1.0f64 / 0.35).log2();
        let i = inst(0.4, 0.35, r2);
        let o = oracle_max_sigma_z2(&i, &OracleGrid::default()).unwrap();
        assert!((o.r1 - cascade_r1(&i).unwrap().r1).abs() < 1e-3);
    }
}
