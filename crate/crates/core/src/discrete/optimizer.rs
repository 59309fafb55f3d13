//! Weighted-sum minimization over cascade test channels.
//!
//! For multipliers `(μ₁, μ₂)` the Lagrangian
//! `I(X; X̂₁X̂₂|Y) + λ I(XY; X̂₂) + μ₁ E d₁ + μ₂ E d₂` is jointly convex in the
//! channel and two auxiliary marginals, which gives an alternating
//! minimization with closed-form steps. Distortion constraints are met by
//! bisection on the multipliers (`μ₂ = (1+λ)ν₂` inside the loop over `μ₁`),
//! followed by mixing the channels on either side of each bracket so the
//! constraint is tight. Work is in nats internally.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{source_shape, CascadeChannel, Stochastic};
use super::evaluate::cascade_rates;
use super::RatePoint;
use crate::error::{Error, Result};
use crate::prob::{DistortionMatrix, JointPmf};

/// Weights used when tracing a boundary; `1e4` stands in for `λ → ∞`.
pub const DEFAULT_LAMBDAS: [f64; 9] = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 1e4];

const PROB_FLOOR: f64 = 1e-12;
const WARM_MIX: f64 = 1e-3;
const MULTIPLIER_MAX: f64 = 1e7;
const MULTIPLIER_MIN: f64 = 1e-9;
/// Bisection stops once the multiplier bracket is this tight (relative).
const BRACKET_RATIO: f64 = 1e-4;

/// How the channel is optimized for fixed multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerMethod {
    /// Closed-form alternating updates of the channel and the marginals.
    Alternating,
    /// Linear minimization over the simplices with golden-section steps.
    ConditionalGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    /// Relative change of the Lagrangian over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    pub bisection_steps: usize,
    pub method: InnerMethod,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-9,
            window: 10,
            bisection_steps: 40,
            method: InnerMethod::Alternating,
        }
    }
}

/// One boundary point with the channel that achieves it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedPoint {
    pub lambda: f64,
    /// Rates and distortions recomputed from `channel`.
    pub point: RatePoint,
    pub channel: CascadeChannel,
    /// Whether every inner solve met the stopping rule before the cap.
    pub converged: bool,
    pub iterations: usize,
    /// Final `(μ₁, μ₂)` in bits per distortion unit.
    pub multipliers: (f64, f64),
    /// Frank–Wolfe gap of the Lagrangian for the solves behind the returned
    /// channel, in bits; before mixing each is solved at its own multipliers.
    pub duality_gap: f64,
}

struct Problem {
    nx: usize,
    ny: usize,
    n1: usize,
    n2: usize,
    pxy: Vec<f64>,
    py: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    /// entries allowed when the first (second) constraint is pinned to its minimum
    min1: Vec<bool>,
    min2: Vec<bool>,
    lambda: f64,
    opts: OptimizerOptions,
}

#[derive(Clone, Copy)]
struct Multipliers {
    mu1: f64,
    nu2: f64,
    pin1: bool,
    pin2: bool,
}

#[derive(Clone)]
struct Candidate {
    q: Vec<f64>,
    e1: f64,
    e2: f64,
    converged: bool,
    iterations: usize,
    m: Multipliers,
    /// Frank–Wolfe gap of the solve, nats; the larger one after mixing
    gap: f64,
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl Problem {
    fn new(
        pxy: &JointPmf,
        d1: &DistortionMatrix,
        d2: &DistortionMatrix,
        lambda: f64,
        opts: OptimizerOptions,
    ) -> Result<Self> {
        let (nx, ny) = source_shape(pxy)?;
        if d1.rows() != nx || d2.rows() != nx {
            return Err(Error::DimensionMismatch(format!(
                "distortion matrices need {nx} rows, got {} and {}",
                d1.rows(),
                d2.rows()
            )));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        let (n1, n2) = (d1.cols(), d2.cols());
        let flat = |d: &DistortionMatrix, n: usize| -> Vec<f64> {
            (0..nx * n).map(|k| d.get(k / n, k % n)).collect()
        };
        let at_min = |d: &DistortionMatrix, n: usize| -> Vec<bool> {
            (0..nx * n)
                .map(|k| d.get(k / n, k % n) <= d.row_min(k / n).1 + 1e-12)
                .collect()
        };
        let p = pxy.probs().to_vec();
        let py = (0..ny).map(|y| (0..nx).map(|x| p[x * ny + y]).sum()).collect();
        Ok(Self {
            nx,
            ny,
            n1,
            n2,
            pxy: p,
            py,
            d1: flat(d1, n1),
            d2: flat(d2, n2),
            min1: at_min(d1, n1),
            min2: at_min(d2, n2),
            lambda,
            opts,
        })
    }

    fn cells(&self) -> usize {
        self.n1 * self.n2
    }

    fn allowed(&self, m: Multipliers, x: usize, a: usize, b: usize) -> bool {
        (!m.pin1 || self.min1[x * self.n1 + a]) && (!m.pin2 || self.min2[x * self.n2 + b])
    }

    fn uniform(&self, m: Multipliers) -> Vec<f64> {
        let mut q = vec![0.0; self.nx * self.ny * self.cells()];
        for x in 0..self.nx {
            for y in 0..self.ny {
                let row = &mut q[(x * self.ny + y) * self.cells()..][..self.cells()];
                let mut count = 0;
                for a in 0..self.n1 {
                    for b in 0..self.n2 {
                        if self.allowed(m, x, a, b) {
                            row[a * self.n2 + b] = 1.0;
                            count += 1;
                        }
                    }
                }
                row.iter_mut().for_each(|v| *v /= count as f64);
            }
        }
        q
    }

    fn distortions(&self, q: &[f64]) -> (f64, f64) {
        let (mut e1, mut e2) = (0.0, 0.0);
        for x in 0..self.nx {
            for y in 0..self.ny {
                let p = self.pxy[x * self.ny + y];
                let row = &q[(x * self.ny + y) * self.cells()..][..self.cells()];
                for a in 0..self.n1 {
                    for b in 0..self.n2 {
                        let w = p * row[a * self.n2 + b];
                        e1 += w * self.d1[x * self.n1 + a];
                        e2 += w * self.d2[x * self.n2 + b];
                    }
                }
            }
        }
        (e1, e2)
    }

    /// `r(x̂₁,x̂₂|y)`, `Q₂(x̂₂|x,y)` and `s(x̂₂)` induced by `q`.
    fn marginals(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (nx, ny, n1, n2, c) = (self.nx, self.ny, self.n1, self.n2, self.cells());
        let mut r = vec![0.0; ny * c];
        let mut q2 = vec![0.0; nx * ny * n2];
        let mut s = vec![0.0; n2];
        for x in 0..nx {
            for y in 0..ny {
                let p = self.pxy[x * ny + y];
                let row = &q[(x * ny + y) * c..][..c];
                for ab in 0..c {
                    if self.py[y] > 0.0 {
                        r[y * c + ab] += p / self.py[y] * row[ab];
                    }
                    q2[(x * ny + y) * n2 + ab % n2] += row[ab];
                }
                for b in 0..n2 {
                    s[b] += p * q2[(x * ny + y) * n2 + b];
                }
            }
        }
        for y in 0..ny {
            if self.py[y] <= 0.0 {
                r[y * c..(y + 1) * c].iter_mut().for_each(|v| *v = 1.0 / c as f64);
            }
        }
        let _ = n1;
        (r, q2, s)
    }

    /// Lagrangian in nats.
    fn lagrangian(&self, q: &[f64], m: Multipliers) -> f64 {
        let (nx, ny, n2, c) = (self.nx, self.ny, self.n2, self.cells());
        let (r, q2, s) = self.marginals(q);
        let mu2 = (1.0 + self.lambda) * m.nu2;
        let mut total = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                let p = self.pxy[x * ny + y];
                if p == 0.0 {
                    continue;
                }
                let row = &q[(x * ny + y) * c..][..c];
                for ab in 0..c {
                    let v = row[ab];
                    if v > 0.0 {
                        let (a, b) = (ab / n2, ab % n2);
                        total += p
                            * v
                            * ((v / r[y * c + ab]).ln()
                                + m.mu1 * self.d1[x * self.n1 + a]
                                + mu2 * self.d2[x * n2 + b]);
                    }
                }
                if self.lambda > 0.0 {
                    for b in 0..n2 {
                        let v = q2[(x * ny + y) * n2 + b];
                        if v > 0.0 {
                            total += p * self.lambda * v * (v / s[b]).ln();
                        }
                    }
                }
            }
        }
        total
    }

    fn alternating_step(&self, q: &mut [f64], m: Multipliers) {
        let (nx, ny, n1, n2, c) = (self.nx, self.ny, self.n1, self.n2, self.cells());
        let (r, _, s) = self.marginals(q);
        let lam = self.lambda;
        let mut log_z = vec![0.0; n2];
        let mut terms = vec![0.0; n1];
        let mut log_q2 = vec![0.0; n2];
        for x in 0..nx {
            for y in 0..ny {
                let row = &mut q[(x * ny + y) * c..][..c];
                for b in 0..n2 {
                    for a in 0..n1 {
                        terms[a] = if self.allowed(m, x, a, b) {
                            r[y * c + a * n2 + b].ln() - m.mu1 * self.d1[x * n1 + a]
                        } else {
                            f64::NEG_INFINITY
                        };
                    }
                    log_z[b] = log_sum_exp(&terms);
                    let side = if lam > 0.0 { lam * s[b].ln() } else { 0.0 };
                    log_q2[b] = if log_z[b] == f64::NEG_INFINITY || side == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        (log_z[b] + side) / (1.0 + lam) - m.nu2 * self.d2[x * n2 + b]
                    };
                }
                let norm = log_sum_exp(&log_q2);
                for b in 0..n2 {
                    for a in 0..n1 {
                        let ab = a * n2 + b;
                        row[ab] = if log_q2[b] == f64::NEG_INFINITY || !self.allowed(m, x, a, b) {
                            0.0
                        } else {
                            (log_q2[b] - norm + r[y * c + ab].ln() - m.mu1 * self.d1[x * n1 + a]
                                - log_z[b])
                                .exp()
                        };
                    }
                }
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= total);
            }
        }
    }

    /// Per-cell gradient of the Lagrangian, weighted by `p(x, y)`.
    fn gradient(&self, q: &[f64], m: Multipliers) -> Vec<f64> {
        let (nx, ny, n1, n2, c) = (self.nx, self.ny, self.n1, self.n2, self.cells());
        let (r, q2, s) = self.marginals(q);
        let mu2 = (1.0 + self.lambda) * m.nu2;
        let mut g = vec![0.0; q.len()];
        for x in 0..nx {
            for y in 0..ny {
                let p = self.pxy[x * ny + y];
                if p == 0.0 {
                    continue;
                }
                // a dead marginal cell is revived by this row alone, which
                // fixes the one-sided ratio at 1/p(x|y) or 1/p(x,y)
                let ratio = |num: f64, den: f64, alone: f64| {
                    if den > PROB_FLOOR {
                        num.max(PROB_FLOOR) / den
                    } else {
                        alone
                    }
                };
                for ab in 0..c {
                    let (a, b) = (ab / n2, ab % n2);
                    let k = (x * ny + y) * c + ab;
                    let mut v = ratio(q[k], r[y * c + ab], self.py[y] / p).ln()
                        + m.mu1 * self.d1[x * n1 + a]
                        + mu2 * self.d2[x * n2 + b];
                    if self.lambda > 0.0 {
                        v += self.lambda * ratio(q2[(x * ny + y) * n2 + b], s[b], 1.0 / p).ln();
                    }
                    g[k] = p * v;
                }
            }
        }
        g
    }

    /// Frank–Wolfe gap in nats; the minimum is over allowed cells.
    fn fw_gap(&self, q: &[f64], m: Multipliers) -> (f64, Vec<usize>) {
        let g = self.gradient(q, m);
        let c = self.cells();
        let mut gap = 0.0;
        let mut vertices = Vec::with_capacity(self.nx * self.ny);
        for x in 0..self.nx {
            for y in 0..self.ny {
                let base = (x * self.ny + y) * c;
                let mut best = (f64::INFINITY, 0);
                for ab in 0..c {
                    if self.allowed(m, x, ab / self.n2, ab % self.n2) && g[base + ab] < best.0 {
                        best = (g[base + ab], ab);
                    }
                }
                let inner: f64 = (0..c).map(|ab| q[base + ab] * g[base + ab]).sum();
                gap += inner - best.0;
                vertices.push(best.1);
            }
        }
        (gap.max(0.0), vertices)
    }

    fn conditional_gradient_step(&self, q: &mut [f64], m: Multipliers) {
        let (_, vertices) = self.fw_gap(q, m);
        let c = self.cells();
        let mut target = vec![0.0; q.len()];
        for (row, &v) in vertices.iter().enumerate() {
            target[row * c + v] = 1.0;
        }
        let at = |t: f64| -> Vec<f64> { q.iter().zip(&target).map(|(a, b)| a + t * (b - a)).collect() };
        let (mut lo, mut hi) = (0.0, 1.0);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = self.lagrangian(&at(x1), m);
        let mut f2 = self.lagrangian(&at(x2), m);
        for _ in 0..60 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = self.lagrangian(&at(x1), m);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = self.lagrangian(&at(x2), m);
            }
        }
        let t = 0.5 * (lo + hi);
        if self.lagrangian(&at(t), m) <= self.lagrangian(q, m) {
            q.copy_from_slice(&at(t));
        }
    }

    /// Minimize the Lagrangian for fixed multipliers starting from `warm`.
    fn solve(&self, warm: &[f64], m: Multipliers) -> Candidate {
        let uniform = self.uniform(m);
        let mut q: Vec<f64> = warm
            .iter()
            .zip(&uniform)
            .map(|(w, u)| (1.0 - WARM_MIX) * w + WARM_MIX * u)
            .collect();
        let mut history = Vec::with_capacity(self.opts.max_iterations + 1);
        history.push(self.lagrangian(&q, m));
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.opts.max_iterations {
            match self.opts.method {
                InnerMethod::Alternating => self.alternating_step(&mut q, m),
                InnerMethod::ConditionalGradient => self.conditional_gradient_step(&mut q, m),
            }
            iterations += 1;
            let value = self.lagrangian(&q, m);
            history.push(value);
            let w = self.opts.window;
            if history.len() > w {
                let old = history[history.len() - 1 - w];
                if (old - value).abs() <= self.opts.tolerance * value.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
        }
        let (e1, e2) = self.distortions(&q);
        let (gap, _) = self.fw_gap(&q, m);
        Candidate { q, e1, e2, converged, iterations, m, gap }
    }
}

fn mix(lo: &Candidate, hi: &Candidate, theta: f64) -> Candidate {
    Candidate {
        q: lo.q.iter().zip(&hi.q).map(|(a, b)| theta * a + (1.0 - theta) * b).collect(),
        e1: theta * lo.e1 + (1.0 - theta) * hi.e1,
        e2: theta * lo.e2 + (1.0 - theta) * hi.e2,
        converged: lo.converged && hi.converged,
        iterations: lo.iterations + hi.iterations,
        m: hi.m,
        gap: lo.gap.max(hi.gap),
    }
}

/// Bracket and bisect a multiplier so `measure(candidate) ≤ budget` holds
/// tightly. `solve(None)` is the pinned fallback that always satisfies it.
fn tighten(
    budget: f64,
    scale: f64,
    steps: usize,
    measure: impl Fn(&Candidate) -> f64,
    mut solve: impl FnMut(Option<f64>) -> Candidate,
) -> Candidate {
    let ok = |c: &Candidate| measure(c) <= budget + 1e-12 * budget.abs().max(1.0);
    let mut total_iterations = 0;
    let mut run = |v: Option<f64>, total: &mut usize| {
        let c = solve(v);
        *total += c.iterations;
        c
    };
    let zero = run(Some(0.0), &mut total_iterations);
    if ok(&zero) {
        return zero;
    }
    // grow until satisfied
    let mut lo = (0.0, zero);
    let mut v = 1.0 / scale;
    let hi = loop {
        let c = run(Some(v), &mut total_iterations);
        if ok(&c) {
            break Some((v, c));
        }
        lo = (v, c);
        if v >= MULTIPLIER_MAX / scale {
            break None;
        }
        v *= 4.0;
    };
    let Some(mut hi) = hi else {
        let pinned = run(None, &mut total_iterations);
        return finish_mix(&lo.1, &pinned, budget, &measure, total_iterations);
    };
    for _ in 0..steps {
        if lo.0 > 0.0 && hi.0 / lo.0 < 1.0 + BRACKET_RATIO {
            break;
        }
        let mid = if lo.0 > 0.0 {
            (lo.0 * hi.0).sqrt()
        } else {
            let m = hi.0 / 4.0;
            if m < MULTIPLIER_MIN / scale {
                break;
            }
            m
        };
        let c = run(Some(mid), &mut total_iterations);
        if ok(&c) {
            hi = (mid, c);
        } else {
            lo = (mid, c);
        }
    }
    finish_mix(&lo.1, &hi.1, budget, &measure, total_iterations)
}

fn finish_mix(
    lo: &Candidate,
    hi: &Candidate,
    budget: f64,
    measure: &impl Fn(&Candidate) -> f64,
    iterations: usize,
) -> Candidate {
    let (ml, mh) = (measure(lo), measure(hi));
    let theta = if ml > mh { ((budget - mh) / (ml - mh)).clamp(0.0, 1.0) } else { 0.0 };
    let mut out = mix(lo, hi, theta);
    out.iterations = iterations;
    out
}

/// Approximately minimize `R₁ + λR₂` subject to `E d₁ ≤ D₁`, `E d₂ ≤ D₂`.
#[allow(clippy::too_many_arguments)]
pub fn minimize_weighted_sum(
    pxy: &JointPmf,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
    max_d1: f64,
    max_d2: f64,
    lambda: f64,
    opts: &OptimizerOptions,
) -> Result<OptimizedPoint> {
    let prob = Problem::new(pxy, d1, d2, lambda, *opts)?;
    let (nx, ny) = (prob.nx, prob.ny);
    let px: Vec<f64> = (0..nx).map(|x| (0..ny).map(|y| prob.pxy[x * ny + y]).sum()).collect();
    let floor = |d: &DistortionMatrix| -> f64 { (0..nx).map(|x| px[x] * d.row_min(x).1).sum() };
    let (min1, min2) = (floor(d1), floor(d2));
    for (name, budget, least) in [("D1", max_d1, min1), ("D2", max_d2, min2)] {
        if !budget.is_finite() || budget < least - 1e-12 {
            return Err(Error::Infeasible(format!(
                "{name} = {budget} is below the smallest achievable expected distortion {least}"
            )));
        }
    }
    let scale1 = (0..prob.d1.len()).map(|k| prob.d1[k]).fold(0.0, f64::max).max(1e-12);
    let scale2 = (0..prob.d2.len()).map(|k| prob.d2[k]).fold(0.0, f64::max).max(1e-12);
    let pin1 = max_d1 <= min1 + 1e-12;
    let pin2 = max_d2 <= min2 + 1e-12;

    let base = Multipliers { mu1: 0.0, nu2: 0.0, pin1, pin2 };
    let mut warm = prob.uniform(base);
    let steps = opts.bisection_steps;

    let inner = |mu1: f64, pin1: bool, warm: &mut Vec<f64>| -> Candidate {
        let m = Multipliers { mu1, nu2: 0.0, pin1, pin2 };
        if pin2 {
            let c = prob.solve(warm, m);
            *warm = c.q.clone();
            return c;
        }
        tighten(max_d2, scale2, steps, |c| c.e2, |nu| {
            let m = match nu {
                Some(nu2) => Multipliers { nu2, ..m },
                None => Multipliers { pin2: true, ..m },
            };
            let c = prob.solve(warm, m);
            *warm = c.q.clone();
            c
        })
    };

    let best = if pin1 {
        inner(0.0, true, &mut warm)
    } else {
        tighten(max_d1, scale1, steps, |c| c.e1, |mu| match mu {
            Some(mu1) => inner(mu1, false, &mut warm),
            None => inner(0.0, true, &mut warm),
        })
    };

    let channel = CascadeChannel::new(
        prob.nx,
        prob.ny,
        prob.n1,
        prob.n2,
        Stochastic::from_flat(prob.nx * prob.ny, prob.cells(), renormalized(&best.q, prob.cells()))?,
    )?;
    let point = cascade_rates(pxy, &channel, d1, d2)?;
    Ok(OptimizedPoint {
        lambda,
        point,
        channel,
        converged: best.converged,
        iterations: best.iterations,
        multipliers: (best.m.mu1 / LN_2, (1.0 + lambda) * best.m.nu2 / LN_2),
        duality_gap: best.gap / LN_2,
    })
}

fn renormalized(q: &[f64], cols: usize) -> Vec<f64> {
    let mut out = q.to_vec();
    for row in out.chunks_mut(cols) {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    out
}

/// Run [`minimize_weighted_sum`] for every weight in parallel; results keep
/// the order of `lambdas`.
pub fn trace_boundary(
    pxy: &JointPmf,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
    max_d1: f64,
    max_d2: f64,
    lambdas: &[f64],
    opts: &OptimizerOptions,
) -> Result<Vec<OptimizedPoint>> {
    lambdas
        .par_iter()
        .map(|&l| minimize_weighted_sum(pxy, d1, d2, max_d1, max_d2, l, opts))
        .collect()
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
    fn lossless_corner() {
        let h = DistortionMatrix::hamming(2);
        let r = minimize_weighted_sum(&dsbs(0.1), &h, &h, 0.0, 0.0, 0.0, &OptimizerOptions::default())
            .unwrap();
        assert!((r.point.rates[0] - binary_entropy(0.1)).abs() < 5e-3);
        assert!((r.point.rates[1] - 1.0).abs() < 5e-3);
    }

    #[test]
    fn loose_distortions_cost_nothing() {
        let h = DistortionMatrix::hamming(2);
        let uniform = JointPmf::new(["x", "y"], vec![2, 2], vec![0.25; 4]).unwrap();
        for lambda in [0.0, 1.0, 1e4] {
            let r = minimize_weighted_sum(&uniform, &h, &h, 0.5, 0.5, lambda, &OptimizerOptions::default())
                .unwrap();
            assert!(r.point.rates[0] < 1e-6 && r.point.rates[1] < 1e-6, "{:?}", r.point);
        }
    }

    #[test]
    fn infeasible_budget_is_rejected() {
        let h = DistortionMatrix::hamming(2);
        let r = minimize_weighted_sum(&dsbs(0.1), &h, &h, -0.1, 0.0, 0.0, &OptimizerOptions::default());
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn constraints_hold_and_gap_is_small() {
        let h = DistortionMatrix::hamming(2);
        let r = minimize_weighted_sum(&dsbs(0.1), &h, &h, 0.05, 0.2, 1.0, &OptimizerOptions::default())
            .unwrap();
        assert!(r.point.distortions[0] <= 0.05 + 1e-9);
        assert!(r.point.distortions[1] <= 0.2 + 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn conditional_gradient_agrees_roughly() {
        let h = DistortionMatrix::hamming(2);
        let mut opts = OptimizerOptions::default();
        let a = minimize_weighted_sum(&dsbs(0.2), &h, &h, 0.1, 0.3, 0.5, &opts).unwrap();
        opts.method = InnerMethod::ConditionalGradient;
        opts.max_iterations = 400;
        opts.bisection_steps = 20;
        let b = minimize_weighted_sum(&dsbs(0.2), &h, &h, 0.1, 0.3, 0.5, &opts).unwrap();
        let obj = |p: &OptimizedPoint| p.point.rates[0] + 0.5 * p.point.rates[1];
        assert!((obj(&a) - obj(&b)).abs() < 2e-2, "{} vs {}", obj(&a), obj(&b));
    }
}
