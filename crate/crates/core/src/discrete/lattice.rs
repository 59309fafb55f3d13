//! Exhaustive lattice search over test channels at tiny alphabets.
//!
//! The cascade channel is written as `P(x̂₂|x,y)·P(x̂₁|x,y,x̂₂)` and every
//! conditional row ranges over the simplex lattice with step `1/m`. Given the
//! first factor, `R₂` and `E d₂` are fixed and the second factor splits into
//! independent contexts `(y, x̂₂)`, each contributing `(E d₁, I(X;X̂₁|y,x̂₂))`
//! additively. Each context is reduced to its lower staircase, so the search
//! returns the exact lattice minimum of `R₁` for every first factor without
//! enumerating the full product.

use std::collections::HashMap;

use rayon::prelude::*;

use super::channel::source_shape;
use super::RatePoint;
use crate::error::{Error, Result};
use crate::geometry::{pareto_indices, RateVector};
use crate::prob::{DistortionMatrix, JointPmf};

/// Largest free-parameter count `|X||Y|(|X̂₁||X̂₂| − 1)` accepted by
/// [`brute_force_boundary`].
pub const MAX_GRID_PARAMETERS: usize = 12;

const MAX_TRIANGULAR_COMBOS: usize = 2_000_000;
const DEDUP_RESOLUTION: f64 = 1e-6;
const BUDGET_SLACK: f64 = 1e-12;

/// `(E d, I)` achieved by one lattice choice in a context, unnormalized.
#[derive(Debug, Clone, Copy)]
struct Step {
    dist: f64,
    info: f64,
}

/// Sorted by distortion with strictly decreasing information.
type Staircase = Vec<Step>;

fn lower_staircase(mut pts: Vec<Step>) -> Staircase {
    pts.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.info.total_cmp(&b.info)));
    let mut out: Staircase = Vec::new();
    for p in pts {
        if out.last().is_none_or(|l| p.info < l.info) {
            out.push(p);
        }
    }
    out
}

fn merge(a: &[Step], b: &[Step], budget: f64) -> Staircase {
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            let dist = p.dist + q.dist;
            if dist <= budget {
                pts.push(Step { dist, info: p.info + q.info });
            }
        }
    }
    lower_staircase(pts)
}

fn best_within(s: &[Step], budget: f64) -> Option<Step> {
    match s.partition_point(|p| p.dist <= budget) {
        0 => None,
        n => Some(s[n - 1]),
    }
}

/// Smallest `info` of `Σ` one point per staircase with total distortion
/// within `budget`; returns `(dist, info)`.
fn min_sum(stairs: &[&Staircase], budget: f64) -> Option<Step> {
    match stairs {
        [] => Some(Step { dist: 0.0, info: 0.0 }),
        [only] => best_within(only, budget),
        [init @ .., last] => {
            let mut acc: Staircase = vec![Step { dist: 0.0, info: 0.0 }];
            for s in init {
                acc = merge(&acc, s, budget);
            }
            acc.iter()
                .filter_map(|p| {
                    best_within(last, budget - p.dist)
                        .map(|q| Step { dist: p.dist + q.dist, info: p.info + q.info })
                })
                .min_by(|a, b| a.info.total_cmp(&b.info))
        }
    }
}

fn slack(budget: f64) -> f64 {
    budget + BUDGET_SLACK * budget.abs().max(1.0)
}

fn compositions(dim: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, m, &mut vec![0; dim], &mut out);
    out
}

/// Points of the probability simplex in `dim` coordinates whose entries are
/// multiples of `1/divisions`.
pub fn simplex_lattice(dim: usize, divisions: usize) -> Result<Vec<Vec<f64>>> {
    if dim == 0 || divisions == 0 {
        return Err(Error::InvalidArgument(format!(
            "simplex lattice needs dim >= 1 and divisions >= 1, got {dim} and {divisions}"
        )));
    }
    Ok(compositions(dim, divisions)
        .into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / divisions as f64).collect())
        .collect())
}

fn divisions(step: f64) -> Result<usize> {
    if !(0.02 - 1e-12..=0.2 + 1e-12).contains(&step) {
        return Err(Error::InvalidArgument(format!("grid step must lie in [0.02, 0.2], got {step}")));
    }
    let m = (1.0 / step).round();
    if (m * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("grid step {step} does not divide 1")));
    }
    Ok(m as usize)
}

/// Calls `f` with every index vector in `{0..base}^len`, first coordinate fastest.
fn for_each_index(len: usize, base: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0; len];
    loop {
        f(&idx);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            idx[k] += 1;
            if idx[k] < base {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Lower staircase of `(Σ w E d, Σ w I)` for one context, rows per source
/// symbol drawn from `rows`. Unnormalized weights keep results additive.
fn context_staircase(weights: &[f64], d: &DistortionMatrix, rows: &[Vec<f64>], budget: f64) -> Staircase {
    let total: f64 = weights.iter().sum();
    let active: Vec<usize> = (0..weights.len()).filter(|&x| weights[x] > 0.0).collect();
    if active.is_empty() {
        return vec![Step { dist: 0.0, info: 0.0 }];
    }
    let n = d.cols();
    let mut pts = Vec::new();
    let mut q = vec![0.0; n];
    for_each_index(active.len(), rows.len(), |idx| {
        q.iter_mut().for_each(|v| *v = 0.0);
        let mut dist = 0.0;
        for (k, &x) in active.iter().enumerate() {
            for (j, &r) in rows[idx[k]].iter().enumerate() {
                q[j] += weights[x] * r;
                dist += weights[x] * r * d.get(x, j);
            }
        }
        if dist > budget {
            return;
        }
        let mut info = 0.0;
        for (k, &x) in active.iter().enumerate() {
            for (j, &r) in rows[idx[k]].iter().enumerate() {
                if r > 0.0 {
                    info += weights[x] * r * (r * total / q[j]).log2();
                }
            }
        }
        pts.push(Step { dist, info: info.max(0.0) });
    });
    lower_staircase(pts)
}

/// Context staircases for `x̂₁` keyed by `(y, numerators over x)`, where the
/// weight of `x` is `p(x,y)·k_x/m`.
fn first_stage_cache(
    p: &[f64],
    nx: usize,
    ny: usize,
    m: usize,
    d1: &DistortionMatrix,
    rows1: &[Vec<f64>],
    budget: f64,
) -> HashMap<(usize, Vec<usize>), Staircase> {
    let mut keys = Vec::new();
    for y in 0..ny {
        for_each_index(nx, m + 1, |k| keys.push((y, k.to_vec())));
    }
    keys.into_par_iter()
        .map(|(y, k)| {
            let w: Vec<f64> = (0..nx).map(|x| p[x * ny + y] * k[x] as f64 / m as f64).collect();
            let s = context_staircase(&w, d1, rows1, budget);
            ((y, k), s)
        })
        .collect()
}

fn entropy_of(v: &[f64]) -> f64 {
    -v.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Everything a choice of `P(·|x, y)` rows for one `y` contributes.
struct Slice {
    /// `Σ_x p(x,y) P(·|x,y)`
    mass: Vec<f64>,
    /// `Σ_x p(x,y) H(P(·|x,y))`
    cond_entropy: f64,
    e2: f64,
    /// `p(y) I(X; ·|Y=y)`
    info: f64,
    stairs: Staircase,
    /// lattice index of the row chosen for each `x`
    rows: Vec<usize>,
}

/// Enumerate the row choices `P(·|x,y)`, `x ∈ X`, for a fixed `y`.
#[allow(clippy::too_many_arguments)]
fn slices(
    p: &[f64],
    nx: usize,
    ny: usize,
    y: usize,
    nums: &[Vec<usize>],
    m: usize,
    cache: &HashMap<(usize, Vec<usize>), Staircase>,
    second: Option<&DistortionMatrix>,
    budget1: f64,
    budget2: f64,
) -> Vec<Slice> {
    let n = nums[0].len();
    let py: f64 = (0..nx).map(|x| p[x * ny + y]).sum();
    let mut out = Vec::new();
    for_each_index(nx, nums.len(), |idx| {
        let prob = |x: usize, b: usize| nums[idx[x]][b] as f64 / m as f64;
        let mut mass = vec![0.0; n];
        let mut cond_entropy = 0.0;
        let mut e2 = 0.0;
        for x in 0..nx {
            let pxy = p[x * ny + y];
            let row: Vec<f64> = (0..n).map(|b| prob(x, b)).collect();
            cond_entropy += pxy * entropy_of(&row);
            for b in 0..n {
                mass[b] += pxy * row[b];
                if let Some(d2) = second {
                    e2 += pxy * row[b] * d2.get(x, b);
                }
            }
        }
        if e2 > budget2 {
            return;
        }
        let info = if py > 0.0 {
            let cond: Vec<f64> = mass.iter().map(|v| v / py).collect();
            (py * entropy_of(&cond) - cond_entropy).max(0.0)
        } else {
            0.0
        };
        let contexts: Vec<&Staircase> = (0..n)
            .map(|b| &cache[&(y, (0..nx).map(|x| nums[idx[x]][b]).collect::<Vec<_>>())])
            .collect();
        let mut stairs: Staircase = vec![Step { dist: 0.0, info: 0.0 }];
        for s in contexts {
            stairs = merge(&stairs, s, budget1);
        }
        if stairs.is_empty() {
            return;
        }
        out.push(Slice { mass, cond_entropy, e2, info, stairs, rows: idx.to_vec() });
    });
    out
}

/// Keep one point per `1e-6` cell, then the Pareto frontier.
fn frontier(points: Vec<RatePoint>) -> Result<Vec<RatePoint>> {
    let mut seen = HashMap::new();
    let mut unique = Vec::new();
    for p in points {
        let key: Vec<i64> = p.rates.iter().map(|r| (r / DEDUP_RESOLUTION).round() as i64).collect();
        if seen.insert(key, ()).is_none() {
            unique.push(p);
        }
    }
    let vectors = unique
        .iter()
        .map(|p| RateVector::new(p.rates.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(pareto_indices(&vectors)?.into_iter().map(|i| unique[i].clone()).collect())
}

fn prefilter_2d(mut pts: Vec<RatePoint>) -> Vec<RatePoint> {
    pts.sort_by(|a, b| a.rates[1].total_cmp(&b.rates[1]).then(a.rates[0].total_cmp(&b.rates[0])));
    let mut best = f64::INFINITY;
    pts.retain(|p| {
        let keep = p.rates[0] < best;
        best = best.min(p.rates[0]);
        keep
    });
    pts
}

fn check_source(pxy: &JointPmf, d1: &DistortionMatrix, d2: &DistortionMatrix) -> Result<(usize, usize)> {
    let (nx, ny) = source_shape(pxy)?;
    if d1.rows() != nx || d2.rows() != nx {
        return Err(Error::DimensionMismatch(format!(
            "distortion matrices need {nx} rows, got {} and {}",
            d1.rows(),
            d2.rows()
        )));
    }
    Ok((nx, ny))
}

/// Pareto frontier of `(R₁, R₂)` over all lattice cascade channels meeting
/// `E d₁ ≤ D₁`, `E d₂ ≤ D₂`. Empty when no lattice channel is feasible.
pub fn brute_force_boundary(
    pxy: &JointPmf,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
    max_d1: f64,
    max_d2: f64,
    step: f64,
) -> Result<Vec<RatePoint>> {
    let (nx, ny) = check_source(pxy, d1, d2)?;
    let (n1, n2) = (d1.cols(), d2.cols());
    let params = nx * ny * (n1 * n2 - 1);
    if params > MAX_GRID_PARAMETERS {
        return Err(Error::TooLarge(format!(
            "{params} channel parameters exceed the grid limit of {MAX_GRID_PARAMETERS}"
        )));
    }
    let m = divisions(step)?;
    let (b1, b2) = (slack(max_d1), slack(max_d2));
    let p = pxy.probs();
    let rows1 = simplex_lattice(n1, m)?;
    let nums2 = compositions(n2, m);
    let cache = first_stage_cache(p, nx, ny, m, d1, &rows1, b1);
    let per_y: Vec<Vec<Slice>> = (0..ny)
        .into_par_iter()
        .map(|y| slices(p, nx, ny, y, &nums2, m, &cache, Some(d2), b1, b2))
        .collect();
    if per_y.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }

    let points: Vec<RatePoint> = (0..per_y[0].len())
        .into_par_iter()
        .flat_map_iter(|i0| {
            let mut local = Vec::new();
            let bases: Vec<usize> = per_y[1..].iter().map(Vec::len).collect();
            let mut idx = vec![0; bases.len()];
            loop {
                let chosen: Vec<&Slice> = std::iter::once(&per_y[0][i0])
                    .chain(idx.iter().zip(&per_y[1..]).map(|(&i, s)| &s[i]))
                    .collect();
                let e2: f64 = chosen.iter().map(|s| s.e2).sum();
                if e2 <= b2 {
                    let stairs: Vec<&Staircase> = chosen.iter().map(|s| &s.stairs).collect();
                    if let Some(best) = min_sum(&stairs, b1) {
                        let mut mass = vec![0.0; n2];
                        for s in &chosen {
                            mass.iter_mut().zip(&s.mass).for_each(|(a, b)| *a += b);
                        }
                        let h: f64 = chosen.iter().map(|s| s.cond_entropy).sum();
                        let r2 = (entropy_of(&mass) - h).max(0.0);
                        let r1 = chosen.iter().map(|s| s.info).sum::<f64>() + best.info;
                        local.push(RatePoint { rates: vec![r1, r2], distortions: vec![best.dist, e2] });
                    }
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        return prefilter_2d(local).into_iter();
                    }
                    idx[k] += 1;
                    if idx[k] < bases[k] {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        })
        .collect();
    frontier(prefilter_2d(points))
}

/// Pareto frontier of `(R₁, R₂, R₃)` over lattice channels
/// `P(u|x,y)·P(x̂₁|x,y,u)·P(x̂₂|x,u)` with `|U| = u_size`.
///
/// Intended for binary alphabets. Restricting `|U|` below the cardinality
/// bound makes this an inner approximation of the triangular region.
pub fn triangular_inner_search(
    pxy: &JointPmf,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
    max_d1: f64,
    max_d2: f64,
    u_size: usize,
    step: f64,
) -> Result<Vec<RatePoint>> {
    let (nx, ny) = check_source(pxy, d1, d2)?;
    if !(1..=3).contains(&u_size) {
        return Err(Error::InvalidArgument(format!("u_size must be 1, 2 or 3, got {u_size}")));
    }
    let m = divisions(step)?;
    let nums_u = compositions(u_size, m);
    let combos = (nums_u.len() as f64).powi((nx * ny) as i32);
    if combos > MAX_TRIANGULAR_COMBOS as f64 {
        return Err(Error::TooLarge(format!(
            "{combos} auxiliary channels at step {step} exceed the limit of {MAX_TRIANGULAR_COMBOS}; use a coarser grid or smaller u_size"
        )));
    }
    let (b1, b2) = (slack(max_d1), slack(max_d2));
    let p = pxy.probs();
    let rows1 = simplex_lattice(d1.cols(), m)?;
    let rows2 = simplex_lattice(d2.cols(), m)?;
    let cache = first_stage_cache(p, nx, ny, m, d1, &rows1, b1);
    let per_y: Vec<Vec<Slice>> = (0..ny)
        .into_par_iter()
        .map(|y| slices(p, nx, ny, y, &nums_u, m, &cache, None, b1, f64::INFINITY))
        .collect();
    if per_y.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let total: usize = per_y.iter().map(Vec::len).product();
    let points: Vec<RatePoint> = (0..total)
        .into_par_iter()
        .filter_map(|flat| {
            let mut rest = flat;
            let mut chosen = Vec::with_capacity(ny);
            let mut u_rows = Vec::with_capacity(ny);
            for slices in &per_y {
                let s = &slices[rest % slices.len()];
                rest /= slices.len();
                chosen.push(s);
                u_rows.push(&s.rows);
            }
            let stairs: Vec<&Staircase> = chosen.iter().map(|s| &s.stairs).collect();
            let first = min_sum(&stairs, b1)?;
            let mut mass = vec![0.0; u_size];
            for s in &chosen {
                mass.iter_mut().zip(&s.mass).for_each(|(a, b)| *a += b);
            }
            let h: f64 = chosen.iter().map(|s| s.cond_entropy).sum();
            let r2 = (entropy_of(&mass) - h).max(0.0);
            let r1 = chosen.iter().map(|s| s.info).sum::<f64>() + first.info;
            // second stage: contexts u weighted by p(x, u)
            let second: Vec<Staircase> = (0..u_size)
                .map(|u| {
                    let w: Vec<f64> = (0..nx)
                        .map(|x| {
                            (0..ny)
                                .map(|y| p[x * ny + y] * nums_u[u_rows[y][x]][u] as f64 / m as f64)
                                .sum()
                        })
                        .collect();
                    context_staircase(&w, d2, &rows2, b2)
                })
                .collect();
            let refs: Vec<&Staircase> = second.iter().collect();
            let last = min_sum(&refs, b2)?;
            Some(RatePoint {
                rates: vec![r1, r2, last.info],
                distortions: vec![first.dist, last.dist],
            })
        })
        .collect();
    frontier(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::binary_entropy;

    fn dsbs(p: f64) -> JointPmf {
        JointPmf::new(
            ["x", "y"],
            vec![2, 2],
            vec![0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)],
        )
        .unwrap()
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(simplex_lattice(2, 20).unwrap().len(), 21);
        assert_eq!(simplex_lattice(4, 20).unwrap().len(), 1771);
        for p in simplex_lattice(3, 5).unwrap() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(simplex_lattice(0, 5).is_err());
    }

    #[test]
    fn staircase_merge_is_exact_minimum() {
        let a = lower_staircase(vec![
            Step { dist: 0.0, info: 3.0 },
            Step { dist: 1.0, info: 1.0 },
            Step { dist: 2.0, info: 0.0 },
        ]);
        let b = lower_staircase(vec![Step { dist: 0.0, info: 2.0 }, Step { dist: 0.5, info: 0.5 }]);
        let best = min_sum(&[&a, &b], 1.5).unwrap();
        assert_eq!(best.info, 1.5);
        assert!(min_sum(&[&a, &b], -1.0).is_none());
    }

    #[test]
    fn lossless_corner_on_grid() {
        let h = DistortionMatrix::hamming(2);
        let f = brute_force_boundary(&dsbs(0.1), &h, &h, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0].rates[0] - binary_entropy(0.1)).abs() < 1e-12);
        assert!((f[0].rates[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loose_distortions_reach_origin() {
        let h = DistortionMatrix::hamming(2);
        let f = brute_force_boundary(&dsbs(0.1), &h, &h, 1.0, 1.0, 0.2).unwrap();
        assert_eq!(f.len(), 1);
        assert!(f[0].rates.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn size_and_step_are_checked() {
        let h2 = DistortionMatrix::hamming(2);
        let h3 = DistortionMatrix::hamming(3);
        let p = JointPmf::new(["x", "y"], vec![3, 2], vec![1.0 / 6.0; 6]).unwrap();
        assert!(matches!(brute_force_boundary(&p, &h3, &h3, 0.5, 0.5, 0.1), Err(Error::TooLarge(_))));
        assert!(brute_force_boundary(&dsbs(0.1), &h2, &h2, 0.5, 0.5, 0.3).is_err());
        assert!(brute_force_boundary(&dsbs(0.1), &h2, &h2, 0.5, 0.5, 0.03).is_err());
        assert!(matches!(
            triangular_inner_search(&dsbs(0.1), &h2, &h2, 0.5, 0.5, 3, 0.05),
            Err(Error::TooLarge(_))
        ));
        assert!(triangular_inner_search(&dsbs(0.1), &h2, &h2, 0.5, 0.5, 4, 0.2).is_err());
    }

    #[test]
    fn constant_auxiliary_has_no_intermediate_rate() {
        let h = DistortionMatrix::hamming(2);
        let f = triangular_inner_search(&dsbs(0.1), &h, &h, 0.0, 0.0, 1, 0.1).unwrap();
        assert_eq!(f.len(), 1);
        let r = &f[0].rates;
        assert!((r[0] - binary_entropy(0.1)).abs() < 1e-12);
        assert_eq!(r[1], 0.0);
        assert!((r[2] - 1.0).abs() < 1e-12);
    }
}
