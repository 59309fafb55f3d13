//! Quadratic-Gaussian cascade and triangular regions.
//!
//! `X ~ N(0, σ²_X)` and the side information is `Y = X + Z` with `Z`
//! independent of `X`. All rates are in bits. A triangular instance with
//! direct rate `R₃` behaves as a cascade instance whose second distortion is
//! `D₂·2^{2R₃}`.

mod conditioning;
mod oracle;

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use conditioning::conditional_variance;
pub use oracle::{oracle_max_sigma_z2, OracleGrid, OracleSolution};

/// `σ²_{X|Y}` for `Y = X + Z`.
pub fn sigma_x_given_y(sigma_x2: f64, sigma_z2: f64) -> Result<f64> {
    if !(sigma_x2 > 0.0) || !sigma_x2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sigma_x2 must be positive and finite, got {sigma_x2}"
        )));
    }
    if sigma_z2.is_nan() || sigma_z2 < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sigma_z2 must be nonnegative, got {sigma_z2}"
        )));
    }
    if sigma_z2.is_infinite() {
        return Ok(sigma_x2);
    }
    Ok(sigma_x2 * sigma_z2 / (sigma_x2 + sigma_z2))
}

fn half_log2_ratio(num: f64, den: f64) -> f64 {
    0.5 * (num / den).log2()
}

/// `R₁ = ½ max(log σ²_{X|Y}/σ²_{X|W,Y}, log σ²_{X|Y}/D₁, 0)`.
pub(crate) fn r1_from_variances(sxy: f64, sxwy: f64, d1: f64) -> f64 {
    half_log2_ratio(sxy, sxwy)
        .max(half_log2_ratio(sxy, d1))
        .max(0.0)
}

/// One query point `(σ²_X, σ²_Z, D₁, D₂, R₂, R₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct GaussianCascadeInstance {
    sigma_x2: f64,
    sigma_z2: f64,
    d1: f64,
    d2: f64,
    r2: f64,
    r3: f64,
}

impl GaussianCascadeInstance {
    /// A cascade instance (`R₃ = 0`). `sigma_z2` may be `f64::INFINITY`.
    pub fn new(sigma_x2: f64, sigma_z2: f64, d1: f64, d2: f64, r2: f64) -> Result<Self> {
        Self::triangular(sigma_x2, sigma_z2, d1, d2, r2, 0.0)
    }

    pub fn triangular(
        sigma_x2: f64,
        sigma_z2: f64,
        d1: f64,
        d2: f64,
        r2: f64,
        r3: f64,
    ) -> Result<Self> {
        let positive_finite = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive_finite("sigma_x2", sigma_x2)?;
        positive_finite("d1", d1)?;
        positive_finite("d2", d2)?;
        if !(sigma_z2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma_z2 must be positive or infinite, got {sigma_z2}"
            )));
        }
        for (name, r) in [("r2", r2), ("r3", r3)] {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and nonnegative, got {r}"
                )));
            }
        }
        Ok(Self { sigma_x2, sigma_z2, d1, d2, r2, r3 })
    }

    pub fn sigma_x2(&self) -> f64 {
        self.sigma_x2
    }

    pub fn sigma_z2(&self) -> f64 {
        self.sigma_z2
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn r3(&self) -> f64 {
        self.r3
    }

    /// `D₂·2^{2R₃}`.
    pub fn d2_eff(&self) -> f64 {
        self.d2 * 2f64.powf(2.0 * self.r3)
    }

    pub fn sigma_x_given_y(&self) -> f64 {
        if self.sigma_z2.is_infinite() {
            self.sigma_x2
        } else {
            self.sigma_x2 * self.sigma_z2 / (self.sigma_x2 + self.sigma_z2)
        }
    }

    pub fn with_r2(&self, r2: f64) -> Result<Self> {
        Self::triangular(self.sigma_x2, self.sigma_z2, self.d1, self.d2, r2, self.r3)
    }

    pub fn with_r3(&self, r3: f64) -> Result<Self> {
        Self::triangular(self.sigma_x2, self.sigma_z2, self.d1, self.d2, self.r2, r3)
    }

    pub fn with_d1(&self, d1: f64) -> Result<Self> {
        Self::triangular(self.sigma_x2, self.sigma_z2, d1, self.d2, self.r2, self.r3)
    }

    pub fn with_d2(&self, d2: f64) -> Result<Self> {
        Self::triangular(self.sigma_x2, self.sigma_z2, self.d1, d2, self.r2, self.r3)
    }

    /// The equivalent cascade instance with `D₂` replaced by `D₂·2^{2R₃}`.
    pub fn as_cascade(&self) -> Self {
        Self { d2: self.d2_eff(), r3: 0.0, ..*self }
    }

    /// `σ²_X / σ²_Z`, zero for independent side information.
    fn snr(&self) -> f64 {
        if self.sigma_z2.is_infinite() {
            0.0
        } else {
            self.sigma_x2 / self.sigma_z2
        }
    }
}

/// A value that may be `+∞`, written as `"inf"` in JSON.
#[derive(Debug, Clone, Copy)]
struct Variance(f64);

impl Serialize for Variance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() && self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Variance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Variance(v)),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(Variance(f64::INFINITY))
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRepr {
    sigma_x2: f64,
    sigma_z2: Variance,
    d1: f64,
    d2: f64,
    r2: f64,
    #[serde(default)]
    r3: f64,
}

impl TryFrom<InstanceRepr> for GaussianCascadeInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        Self::triangular(r.sigma_x2, r.sigma_z2.0, r.d1, r.d2, r.r2, r.r3)
    }
}

impl From<GaussianCascadeInstance> for InstanceRepr {
    fn from(i: GaussianCascadeInstance) -> Self {
        Self {
            sigma_x2: i.sigma_x2,
            sigma_z2: Variance(i.sigma_z2),
            d1: i.d1,
            d2: i.d2,
            r2: i.r2,
            r3: i.r3,
        }
    }
}

/// Which branch of the closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GaussianCase {
    #[serde(rename = "a")]
    CaseA,
    #[serde(rename = "b")]
    CaseB,
    #[serde(rename = "c")]
    CaseC,
    #[serde(rename = "d")]
    CaseD,
    #[serde(rename = "infeasible")]
    Infeasible,
}

impl fmt::Display for GaussianCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CaseA => "a",
            Self::CaseB => "b",
            Self::CaseC => "c",
            Self::CaseD => "d",
            Self::Infeasible => "infeasible",
        })
    }
}

/// `R₂` thresholds of an instance, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseThresholds {
    /// Below this `R₂` no description meets `D₂`.
    pub feasibility: f64,
    /// Where the A→B (or C→D) transition happens; may be `+∞`.
    #[serde(with = "variance_field")]
    pub transition: f64,
    /// Whether `D₂_eff ≤ σ²_{X|Y}` (the A/B side).
    pub low_distortion: bool,
}

pub fn case_thresholds(inst: &GaussianCascadeInstance) -> CaseThresholds {
    let sx2 = inst.sigma_x2;
    let d2 = inst.d2_eff();
    if d2 >= sx2 {
        return CaseThresholds { feasibility: 0.0, transition: 0.0, low_distortion: false };
    }
    let feasibility = half_log2_ratio(sx2, d2);
    let rho = inst.snr();
    let low_distortion = d2 <= inst.sigma_x_given_y();
    let transition = if low_distortion {
        let den = sx2 - d2 * (1.0 + rho);
        if den <= 0.0 {
            f64::INFINITY
        } else {
            0.5 * ((sx2 - d2) / den * (sx2 / d2)).log2()
        }
    } else {
        let den = d2 * (1.0 + rho) - sx2;
        if den <= 0.0 {
            f64::INFINITY
        } else {
            0.5 * (sx2 * rho / den).log2()
        }
    };
    CaseThresholds { feasibility, transition, low_distortion }
}

/// Ties at a threshold go to the later branch (B over A, D over C).
pub fn classify_case(inst: &GaussianCascadeInstance) -> GaussianCase {
    if inst.d2_eff() >= inst.sigma_x2 {
        return GaussianCase::CaseD;
    }
    let th = case_thresholds(inst);
    let r2 = inst.r2;
    if r2 < th.feasibility {
        return GaussianCase::Infeasible;
    }
    match (th.low_distortion, r2 >= th.transition) {
        (true, true) => GaussianCase::CaseB,
        (true, false) => GaussianCase::CaseA,
        (false, true) => GaussianCase::CaseD,
        (false, false) => GaussianCase::CaseC,
    }
}

fn infeasible_error(inst: &GaussianCascadeInstance) -> Error {
    let th = case_thresholds(inst);
    Error::Infeasible(format!(
        "R2 = {} bits is below the feasibility bound 1/2*log2(sigma_x2/D2) = {} bits \
         (sigma_x2 = {}, effective D2 = {})",
        inst.r2,
        th.feasibility,
        inst.sigma_x2,
        inst.d2_eff()
    ))
}

/// `D₂_eff − σ²_X 2^{−2R₂}`, clamped at zero against rounding.
fn excess_distortion(inst: &GaussianCascadeInstance) -> f64 {
    (inst.d2_eff() - inst.sigma_x2 * 2f64.powf(-2.0 * inst.r2)).max(0.0)
}

/// The coefficient `α` of `W = X + αY + Z₂` in Cases A and C.
pub fn alpha_coeff(inst: &GaussianCascadeInstance) -> Result<f64> {
    match classify_case(inst) {
        GaussianCase::CaseA | GaussianCase::CaseC => {}
        other => {
            return Err(Error::InvalidState(format!(
                "alpha is defined only in cases a and c, instance is in case {other}"
            )))
        }
    }
    let eps = excess_distortion(inst);
    if eps == 0.0 {
        return Ok(0.0);
    }
    if inst.sigma_z2.is_infinite() {
        return Ok(0.0);
    }
    let s = (inst.sigma_z2 / inst.sigma_x2).sqrt() * ((inst.sigma_x2 - inst.d2_eff()) / eps).sqrt();
    let den = s - 1.0;
    if den.abs() <= 1e-12 * s.max(1.0) {
        return Err(Error::Singular(format!(
            "alpha denominator vanishes (scale factor {s})"
        )));
    }
    Ok(1.0 / den)
}

/// `1/σ²_{Z₂}` in Cases A and C, written so it stays finite at `α = 0`.
fn aux_precision(inst: &GaussianCascadeInstance) -> f64 {
    let sx2 = inst.sigma_x2;
    let t = 2f64.powf(2.0 * inst.r2);
    let a = (sx2 - inst.d2_eff()).sqrt() / sx2;
    let b = if inst.sigma_z2.is_infinite() {
        0.0
    } else {
        excess_distortion(inst).sqrt() / (sx2 * inst.sigma_z2).sqrt()
    };
    t * (a - b) * (a - b)
}

/// `σ²_{X|W,Y}` at the optimal auxiliary description.
pub fn sigma_x_given_wy(inst: &GaussianCascadeInstance) -> Result<f64> {
    let sxy = inst.sigma_x_given_y();
    match classify_case(inst) {
        GaussianCase::Infeasible => Err(infeasible_error(inst)),
        GaussianCase::CaseB => Ok(inst.d2_eff()),
        GaussianCase::CaseD => Ok(sxy),
        GaussianCase::CaseA | GaussianCase::CaseC => Ok(1.0 / (aux_precision(inst) + 1.0 / sxy)),
    }
}

/// One point of the region boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianRegionPoint {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub sigma_x_given_wy: f64,
    pub case: GaussianCase,
}

/// Minimal `R₁` for the instance.
pub fn cascade_r1(inst: &GaussianCascadeInstance) -> Result<GaussianRegionPoint> {
    let sxwy = sigma_x_given_wy(inst)?;
    Ok(GaussianRegionPoint {
        r1: r1_from_variances(inst.sigma_x_given_y(), sxwy, inst.d1),
        r2: inst.r2,
        r3: inst.r3,
        sigma_x_given_wy: sxwy,
        case: classify_case(inst),
    })
}

/// `W = (1+α)X + αZ + Z₂`, `V = X + βY + γZ₂ + Z₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTestChannel {
    pub alpha: f64,
    #[serde(with = "variance_field")]
    pub sigma_z2_aux: f64,
    #[serde(with = "variance_field")]
    pub sigma_z1_aux: f64,
    pub beta: f64,
    pub gamma: f64,
}

mod variance_field {
    use super::Variance;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        Variance(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Variance::deserialize(d).map(|v| v.0)
    }
}

/// Conditional variances realized by a test channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelVariances {
    pub x_given_wy: f64,
    pub x_given_wvy: f64,
    /// `I(X,Y;W)` in bits.
    pub rate_w: f64,
}

impl GaussianTestChannel {
    /// Evaluate the channel against a source, using linear-Gaussian
    /// conditioning over the sources `(X, Z, Z₂, Z₁)`.
    pub fn variances(&self, sigma_x2: f64, sigma_z2: f64) -> Result<ChannelVariances> {
        let vars = [sigma_x2, sigma_z2, self.sigma_z2_aux, self.sigma_z1_aux];
        let target = [1.0, 0.0, 0.0, 0.0];
        let y = vec![1.0, 1.0, 0.0, 0.0];
        let w = vec![1.0 + self.alpha, self.alpha, 1.0, 0.0];
        let v = vec![1.0 + self.beta, self.beta, self.gamma, 1.0];
        let x_given_wy = conditional_variance(&vars, &target, &[y.clone(), w.clone()])?;
        let x_given_wvy = conditional_variance(&vars, &target, &[y, w, v])?;
        let rate_w = if self.sigma_z2_aux.is_infinite() {
            0.0
        } else {
            let signal = (1.0 + self.alpha).powi(2) * sigma_x2
                + if self.alpha == 0.0 { 0.0 } else { self.alpha * self.alpha * sigma_z2 };
            half_log2_ratio(signal + self.sigma_z2_aux, self.sigma_z2_aux)
        };
        Ok(ChannelVariances { x_given_wy, x_given_wvy, rate_w })
    }
}

/// The auxiliary structure realizing [`cascade_r1`].
pub fn test_channel_params(inst: &GaussianCascadeInstance) -> Result<GaussianTestChannel> {
    let sxwy = sigma_x_given_wy(inst)?;
    let (alpha, sigma_z2_aux) = match classify_case(inst) {
        GaussianCase::CaseA | GaussianCase::CaseC => {
            let p = aux_precision(inst);
            let aux = if p > 0.0 { 1.0 / p } else { f64::INFINITY };
            (alpha_coeff(inst)?, aux)
        }
        GaussianCase::CaseB => {
            let sx2 = inst.sigma_x2;
            let d2 = inst.d2_eff();
            let alpha = if inst.sigma_z2.is_infinite() {
                0.0
            } else {
                let lead = sx2 * d2 / inst.sigma_z2;
                -lead / (lead + d2 - sx2)
            };
            let inv_z2 = if inst.sigma_z2.is_infinite() { 0.0 } else { 1.0 / inst.sigma_z2 };
            let prec = 1.0 / d2 - inv_z2 - 1.0 / sx2;
            let aux = if prec > 0.0 { 1.0 / prec } else { f64::INFINITY };
            (alpha, aux)
        }
        GaussianCase::CaseD => (0.0, f64::INFINITY),
        GaussianCase::Infeasible => unreachable!("sigma_x_given_wy rejects infeasible instances"),
    };
    let sigma_z1_aux = if inst.d1 < sxwy {
        1.0 / (1.0 / inst.d1 - 1.0 / sxwy)
    } else {
        f64::INFINITY
    };
    Ok(GaussianTestChannel { alpha, sigma_z2_aux, sigma_z1_aux, beta: 0.0, gamma: 0.0 })
}

/// The regime where User 2's description carries only side information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideInfoOnlyRegion {
    /// Smallest `D₂` reachable from a description of `Y` alone at rate `R₂`.
    pub d2_min: f64,
    /// `R₁` once User 2 needs nothing beyond `Y`.
    pub r1: f64,
    /// `lim_{R₂→∞} R₁` for the instance's `(D₁, D₂)`.
    pub r1_asymptote: f64,
}

pub fn side_info_only_region(inst: &GaussianCascadeInstance) -> SideInfoOnlyRegion {
    let sx2 = inst.sigma_x2;
    let sxy = inst.sigma_x_given_y();
    let d2_min = if inst.sigma_z2.is_infinite() {
        sx2
    } else {
        sx2 * (sx2 * 2f64.powf(-2.0 * inst.r2) + inst.sigma_z2) / (sx2 + inst.sigma_z2)
    };
    let r1 = half_log2_ratio(sxy, inst.d1).max(0.0);
    let d2 = inst.d2_eff();
    let r1_asymptote = if d2 <= sxy {
        r1_from_variances(sxy, d2, inst.d1)
    } else {
        r1
    };
    SideInfoOnlyRegion { d2_min, r1, r1_asymptote }
}

/// A sampled `R₁(R₂)` curve; infeasible samples carry no rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSweep {
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub r2: f64,
    pub r1: Option<f64>,
    pub case: GaussianCase,
    pub sigma_x_given_wy: Option<f64>,
}

impl GaussianSweep {
    /// CSV with columns `r2,r1,case,sigma_x_given_wy`; infeasible rows leave
    /// the numeric fields empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r2,r1,case,sigma_x_given_wy\n");
        for p in &self.points {
            let num = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                format_sig12(p.r2),
                num(p.r1),
                p.case,
                num(p.sigma_x_given_wy)
            ));
        }
        out
    }
}

/// Twelve significant digits, `.` decimal separator.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{:.11e}", v);
    // round-trip through the parser to drop trailing zeros and the exponent
    let parsed: f64 = s.parse().unwrap_or(v);
    format!("{parsed}")
}

/// Evaluate the template at each `R₂`, in parallel, preserving order.
pub fn sweep_r2(template: &GaussianCascadeInstance, r2_values: &[f64]) -> Result<GaussianSweep> {
    if let Some(w) = r2_values.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(format!(
            "r2 values must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let points = r2_values
        .par_iter()
        .map(|&r2| {
            let inst = template.with_r2(r2)?;
            Ok(match cascade_r1(&inst) {
                Ok(p) => SweepPoint {
                    r2,
                    r1: Some(p.r1),
                    case: p.case,
                    sigma_x_given_wy: Some(p.sigma_x_given_wy),
                },
                Err(Error::Infeasible(_)) => SweepPoint {
                    r2,
                    r1: None,
                    case: GaussianCase::Infeasible,
                    sigma_x_given_wy: None,
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianSweep { points })
}

/// A random feasible instance: log-uniform variances in `[1e-2, 1e2]`,
/// distortions uniform in `(0, σ²_X)`, `R₂` uniform within 4 bits above the
/// feasibility threshold. `σ²_Z` is finite.
pub fn sample_instance<R: Rng + ?Sized>(rng: &mut R) -> GaussianCascadeInstance {
    let log_uniform = |rng: &mut R| 10f64.powf(rng.gen_range(-2.0..=2.0));
    let sigma_x2 = log_uniform(rng);
    let sigma_z2 = log_uniform(rng);
    let open_unit = |rng: &mut R| loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    };
    let d1 = sigma_x2 * open_unit(rng);
    let d2 = sigma_x2 * open_unit(rng);
    let threshold = half_log2_ratio(sigma_x2, d2);
    let r2 = threshold + rng.gen_range(0.0..=4.0);
    GaussianCascadeInstance::new(sigma_x2, sigma_z2, d1, d2, r2)
        .expect("sampled parameters are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(d1: f64, d2: f64, r2: f64) -> GaussianCascadeInstance {
        GaussianCascadeInstance::new(1.0, 1.0, d1, d2, r2).unwrap()
    }

    #[test]
    fn sigma_x_given_y_examples() {
        assert_eq!(sigma_x_given_y(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(sigma_x_given_y(1.0, f64::INFINITY).unwrap(), 1.0);
        assert_eq!(sigma_x_given_y(4.0, 4.0).unwrap(), 2.0);
        assert_eq!(sigma_x_given_y(4.0, 0.0).unwrap(), 0.0);
        assert!(sigma_x_given_y(0.0, 1.0).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_case(&inst(0.4, 0.35, 1.0)), GaussianCase::CaseA);
        assert_eq!(classify_case(&inst(0.4, 0.35, 2.0)), GaussianCase::CaseB);
        assert_eq!(classify_case(&inst(0.4, 0.35, 0.5)), GaussianCase::Infeasible);
        assert_eq!(classify_case(&inst(0.5, 0.65, 0.7)), GaussianCase::CaseC);
        assert_eq!(classify_case(&inst(0.5, 0.65, 1.0)), GaussianCase::CaseD);
        assert_eq!(classify_case(&inst(0.5, 1.5, 0.0)), GaussianCase::CaseD);
    }

    #[test]
    fn thresholds_match_hand_arithmetic() {
        let th = case_thresholds(&inst(0.4, 0.35, 1.0));
        assert!((th.feasibility - 0.5 * (1.0f64 / 0.35).log2()).abs() < 1e-12);
        assert!((th.transition - 0.5 * (0.65 / 0.3 / 0.35f64).log2()).abs() < 1e-12);
        let th = case_thresholds(&inst(0.5, 0.65, 1.0));
        assert!((th.transition - 0.5 * (1.0f64 / 0.3).log2()).abs() < 1e-12);
    }

    #[test]
    fn alpha_example() {
        let a = alpha_coeff(&inst(0.4, 0.35, 1.0)).unwrap();
        assert!((a - 1.0 / (6.5f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(matches!(alpha_coeff(&inst(0.4, 0.35, 2.0)), Err(Error::InvalidState(_))));
    }

    #[test]
    fn alpha_vanishes_at_feasibility_boundary() {
        let d2: f64 = 0.35;
        let r2 = 0.5 * (1.0 / d2).log2();
        let i = inst(0.4, d2, r2);
        assert_eq!(alpha_coeff(&i).unwrap(), 0.0);
        // precision form: 1/D₂ + 1/σ²_Z... equivalently σ²_{X|W,Y} = D₂ σ²_Z/(D₂+σ²_Z)
        let v = sigma_x_given_wy(&i).unwrap();
        assert!((v - d2 / (1.0 + d2)).abs() < 1e-12);
    }

    #[test]
    fn conditional_variance_examples() {
        assert!((sigma_x_given_wy(&inst(0.4, 0.35, 1.0)).unwrap() - 0.33779).abs() < 1e-4);
        assert_eq!(sigma_x_given_wy(&inst(0.4, 0.35, 2.0)).unwrap(), 0.35);
        assert_eq!(sigma_x_given_wy(&inst(0.4, 0.65, 1.0)).unwrap(), 0.5);
    }

    #[test]
    fn precision_form_matches_alpha_form() {
        let i = inst(0.4, 0.35, 1.0);
        let a = alpha_coeff(&i).unwrap();
        let t = 4.0;
        let by_alpha = 1.0 / ((t * 0.35 - 1.0) / (a * a) + 2.0);
        assert!((sigma_x_given_wy(&i).unwrap() - by_alpha).abs() < 1e-12);
    }

    #[test]
    fn r1_examples() {
        let p = cascade_r1(&inst(0.4, 0.35, 2.0)).unwrap();
        assert!((p.r1 - 0.5 * (0.5f64 / 0.35).log2()).abs() < 1e-12);
        let p = cascade_r1(&inst(0.4, 0.35, 1.0)).unwrap();
        assert!((p.r1 - 0.2830).abs() < 5e-4);
        let i = GaussianCascadeInstance::new(1.0, f64::INFINITY, 0.25, 0.5, 2.0).unwrap();
        assert!((cascade_r1(&i).unwrap().r1 - 1.0).abs() < 1e-12);
        assert!(matches!(cascade_r1(&inst(0.4, 0.35, 0.5)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn infeasible_message_names_the_bound() {
        let Err(Error::Infeasible(msg)) = cascade_r1(&inst(0.4, 0.35, 0.5)) else {
            panic!("expected infeasible");
        };
        assert!(msg.contains("1/2*log2(sigma_x2/D2)"));
        assert!(msg.contains("0.757"));
    }

    #[test]
    fn case_b_channel_is_the_limit_maximizer() {
        let ch = test_channel_params(&inst(0.4, 0.35, 2.0)).unwrap();
        assert!((ch.alpha - 7.0 / 6.0).abs() < 1e-12);
        assert!((ch.sigma_z2_aux - 7.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn z1_variance_example() {
        // σ²_{X|W,Y} = 0.35 in case b, D₁ = 0.3
        let ch = test_channel_params(&inst(0.3, 0.35, 2.0)).unwrap();
        assert!((ch.sigma_z1_aux - 2.1).abs() < 1e-12);
        let ch = test_channel_params(&inst(0.4, 0.35, 2.0)).unwrap();
        assert!(ch.sigma_z1_aux.is_infinite());
    }

    #[test]
    fn side_info_only_example() {
        let s = side_info_only_region(&inst(0.6, 0.35, 1.0));
        assert!((s.d2_min - 0.625).abs() < 1e-12);
        assert_eq!(s.r1, 0.0);
    }

    #[test]
    fn sweep_flags_infeasible_points() {
        let s = sweep_r2(&inst(0.4, 0.35, 0.0), &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(s.points[0].case, GaussianCase::Infeasible);
        assert!(s.points[0].r1.is_none());
        assert_eq!(s.points[2].case, GaussianCase::CaseB);
        let csv = s.to_csv();
        assert!(csv.starts_with("r2,r1,case,sigma_x_given_wy\n0.5,,infeasible,\n"));
        assert!(sweep_r2(&inst(0.4, 0.35, 0.0), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn json_accepts_infinite_side_noise() {
        let i: GaussianCascadeInstance = serde_json::from_str(
            r#"{"sigma_x2":1,"sigma_z2":"inf","d1":0.25,"d2":0.5,"r2":2}"#,
        )
        .unwrap();
        assert!(i.sigma_z2().is_infinite());
        assert_eq!(i.r3(), 0.0);
        let back = serde_json::to_string(&i).unwrap();
        assert!(back.contains(r#""sigma_z2":"inf""#));
        let again: GaussianCascadeInstance = serde_json::from_str(&back).unwrap();
        assert_eq!(again, i);
        assert!(serde_json::from_str::<GaussianCascadeInstance>(
            r#"{"sigma_x2":-1,"sigma_z2":1,"d1":0.25,"d2":0.5,"r2":2}"#
        )
        .is_err());
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(0.1 + 0.2), "0.3");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(1.5), "1.5");
    }
}
