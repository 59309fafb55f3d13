//! Finite probability primitives.
//!
//! Everything here works on small dense arrays: a [`JointPmf`] stores the full
//! Cartesian product of its variables' alphabets in row-major order (the last
//! variable varies fastest). Information quantities are in bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Probabilities below this contribute exactly zero to entropy sums.
pub const ZERO_PROBABILITY: f64 = 1e-15;

/// Negative information values down to this size are rounding noise.
const NEGATIVE_INFO_TOLERANCE: f64 = 1e-12;

fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} is {p}, expected a finite nonnegative value"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// `-Σ p log₂ p` over a raw probability slice, skipping negligible entries.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p >= ZERO_PROBABILITY)
        .map(|&p| -p * p.log2())
        .sum()
}

/// A probability mass function over `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probabilities(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            probs: vec![1.0 / len as f64; len],
        })
    }

    pub fn point_mass(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::InvalidArgument(format!(
                "symbol {at} outside alphabet of size {len}"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// Entropy of a pmf in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_bits(&p.probs)
}

/// Binary entropy function `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

#[derive(Serialize, Deserialize)]
struct JointPmfRepr {
    vars: Vec<String>,
    shape: Vec<usize>,
    probs: Vec<f64>,
}

/// A joint pmf over named finite-alphabet variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointPmfRepr", into = "JointPmfRepr")]
pub struct JointPmf {
    vars: Vec<String>,
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl TryFrom<JointPmfRepr> for JointPmf {
    type Error = Error;

    fn try_from(r: JointPmfRepr) -> Result<Self> {
        Self::new(r.vars, r.shape, r.probs)
    }
}

impl From<JointPmf> for JointPmfRepr {
    fn from(j: JointPmf) -> Self {
        Self {
            vars: j.vars,
            shape: j.shape,
            probs: j.probs,
        }
    }
}

impl JointPmf {
    pub fn new<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        shape: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        if vars.len() != shape.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} variable names for {} dimensions",
                vars.len(),
                shape.len()
            )));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidDistribution("zero-size alphabet".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidArgument(format!("duplicate variable name {v:?}")));
            }
        }
        let cells: usize = shape.iter().product();
        if cells != probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "shape {shape:?} has {cells} cells but {} probabilities were given",
                probs.len()
            )));
        }
        check_probabilities(&probs)?;
        Ok(Self { vars, shape, probs })
    }

    /// Builds a joint pmf from nonnegative weights, normalizing them.
    pub fn from_weights<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        shape: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be nonnegative with a positive finite sum".into(),
            ));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self::new(vars, shape, probs)
    }

    /// Wraps a single pmf as a one-variable joint.
    pub fn from_pmf(name: impl Into<String>, p: &Pmf) -> Self {
        Self {
            vars: vec![name.into()],
            shape: vec![p.len()],
            probs: p.probs.clone(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_vars(&self) -> usize {
        self.shape.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Resolves variable names to indices.
    pub fn indices_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.var_index(n)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown variable {n:?}")))
            })
            .collect()
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Probability of one outcome tuple.
    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        if idx.len() != self.shape.len() || idx.iter().zip(&self.shape).any(|(i, n)| i >= n) {
            return Err(Error::InvalidArgument(format!(
                "index {idx:?} outside shape {:?}",
                self.shape
            )));
        }
        Ok(self.probs[self.flat_index(idx)])
    }

    fn check_vars(&self, set: &[usize]) -> Result<()> {
        for (i, &v) in set.iter().enumerate() {
            if v >= self.num_vars() {
                return Err(Error::InvalidArgument(format!(
                    "variable index {v} out of range for {} variables",
                    self.num_vars()
                )));
            }
            if set[..i].contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "variable index {v} listed twice"
                )));
            }
        }
        Ok(())
    }

    /// Dense marginal over `keep` (in the given order) without validation.
    fn marginal_probs(&self, keep: &[usize]) -> Vec<f64> {
        let out_shape: Vec<usize> = keep.iter().map(|&v| self.shape[v]).collect();
        let mut out = vec![0.0; out_shape.iter().product()];
        let mut idx = vec![0usize; self.shape.len()];
        for &p in &self.probs {
            if p != 0.0 {
                let target = keep
                    .iter()
                    .zip(&out_shape)
                    .fold(0, |acc, (&v, &n)| acc * n + idx[v]);
                out[target] += p;
            }
            // odometer increment, last variable fastest
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                if idx[d] < self.shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        out
    }

    /// Marginal distribution of the listed variables, in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPmf> {
        self.check_vars(keep)?;
        if keep.is_empty() {
            return Err(Error::InvalidArgument("marginal over no variables".into()));
        }
        Ok(JointPmf {
            vars: keep.iter().map(|&v| self.vars[v].clone()).collect(),
            shape: keep.iter().map(|&v| self.shape[v]).collect(),
            probs: self.marginal_probs(keep),
        })
    }

    /// Joint entropy of a subset of variables; the empty set has entropy 0.
    pub fn entropy_of(&self, set: &[usize]) -> Result<f64> {
        self.check_vars(set)?;
        if set.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_bits(&self.marginal_probs(set)))
    }
}

fn check_disjoint(groups: &[&[usize]]) -> Result<()> {
    for (i, g) in groups.iter().enumerate() {
        for h in &groups[i + 1..] {
            if let Some(v) = g.iter().find(|v| h.contains(v)) {
                return Err(Error::InvalidArgument(format!(
                    "variable index {v} appears in more than one group"
                )));
            }
        }
    }
    Ok(())
}

fn union(groups: &[&[usize]]) -> Vec<usize> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

/// `I(A;B)` in bits for disjoint, nonempty variable groups.
pub fn mutual_information(joint: &JointPmf, a: &[usize], b: &[usize]) -> Result<f64> {
    conditional_mutual_information(joint, a, b, &[])
}

/// `I(A;B|C)` in bits. `c` may be empty.
pub fn conditional_mutual_information(
    joint: &JointPmf,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty variable group".into()));
    }
    check_disjoint(&[a, b, c])?;
    let h_ac = joint.entropy_of(&union(&[a, c]))?;
    let h_bc = joint.entropy_of(&union(&[b, c]))?;
    let h_abc = joint.entropy_of(&union(&[a, b, c]))?;
    let h_c = joint.entropy_of(c)?;
    Ok(clamp_information(h_ac + h_bc - h_abc - h_c))
}

pub(crate) fn clamp_information(v: f64) -> f64 {
    if (-NEGATIVE_INFO_TOLERANCE..0.0).contains(&v) {
        0.0
    } else {
        v.max(0.0)
    }
}

/// Per-letter distortion `d(x, x̂)` between a source and a reconstruction alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DistortionMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistortionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::InvalidArgument("empty distortion matrix".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged distortion matrix".into()));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "distortion entries must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            rows: values.len() / cols,
            cols,
            values,
        })
    }

    /// Hamming distortion on an alphabet of size `n`.
    pub fn hamming(n: usize) -> Self {
        let values = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
            .collect();
        Self {
            rows: n,
            cols: n,
            values,
        }
    }

    /// Source alphabet size.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Reconstruction alphabet size.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, xhat: usize) -> f64 {
        self.values[x * self.cols + xhat]
    }

    /// Smallest distortion reachable from source symbol `x`, with its argmin.
    pub fn row_min(&self, x: usize) -> (usize, f64) {
        let row = &self.values[x * self.cols..(x + 1) * self.cols];
        row.iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (j, v)| if v < best.1 { (j, v) } else { best })
    }
}

impl TryFrom<Vec<Vec<f64>>> for DistortionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<DistortionMatrix> for Vec<Vec<f64>> {
    fn from(d: DistortionMatrix) -> Self {
        d.values.chunks(d.cols).map(<[f64]>::to_vec).collect()
    }
}

/// `E d(X, X̂)` where `source` and `recon` index variables of `joint`.
pub fn expected_distortion(
    joint: &JointPmf,
    source: usize,
    recon: usize,
    d: &DistortionMatrix,
) -> Result<f64> {
    joint.check_vars(&[source, recon])?;
    if joint.shape[source] != d.rows() || joint.shape[recon] != d.cols() {
        return Err(Error::DimensionMismatch(format!(
            "distortion matrix is {}x{} but alphabets are {} and {}",
            d.rows(),
            d.cols(),
            joint.shape[source],
            joint.shape[recon]
        )));
    }
    let pair = joint.marginal_probs(&[source, recon]);
    Ok(pair
        .iter()
        .enumerate()
        .map(|(k, p)| p * d.get(k / d.cols(), k % d.cols()))
        .sum())
}

/// Joint type of equal-length symbol sequences, alphabet sizes inferred
/// from the largest symbol of each sequence.
pub fn empirical_type(sequences: &[Vec<usize>]) -> Result<JointPmf> {
    let shape: Vec<usize> = sequences
        .iter()
        .map(|s| s.iter().max().map_or(1, |m| m + 1))
        .collect();
    empirical_type_with_shape(sequences, &shape)
}

/// Joint type of equal-length symbol sequences over the given alphabet sizes.
pub fn empirical_type_with_shape(sequences: &[Vec<usize>], shape: &[usize]) -> Result<JointPmf> {
    let first = sequences
        .first()
        .ok_or_else(|| Error::InvalidArgument("no sequences".into()))?;
    let n = first.len();
    if n == 0 {
        return Err(Error::InvalidArgument("sequences are empty".into()));
    }
    if let Some(bad) = sequences.iter().position(|s| s.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "sequence {bad} has length {} but sequence 0 has length {n}",
            sequences[bad].len()
        )));
    }
    if shape.len() != sequences.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} alphabet sizes for {} sequences",
            shape.len(),
            sequences.len()
        )));
    }
    let mut counts = vec![0usize; shape.iter().product()];
    for t in 0..n {
        let mut flat = 0;
        for (seq, &size) in sequences.iter().zip(shape) {
            let a = seq[t];
            if a >= size {
                return Err(Error::InvalidArgument(format!(
                    "symbol {a} outside alphabet of size {size}"
                )));
            }
            flat = flat * size + a;
        }
        counts[flat] += 1;
    }
    let vars: Vec<String> = (0..sequences.len()).map(|i| format!("v{i}")).collect();
    let probs = counts.into_iter().map(|c| c as f64 / n as f64).collect();
    JointPmf::new(vars, shape.to_vec(), probs)
}

/// Total variation distance `½ Σ |p − q|` between joints of the same shape.
pub fn total_variation(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    if p.shape != q.shape {
        return Err(Error::DimensionMismatch(format!(
            "shapes {:?} and {:?} differ",
            p.shape, q.shape
        )));
    }
    let sum: f64 = p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * sum).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dsbs(p: f64) -> JointPmf {
        JointPmf::new(
            ["x", "y"],
            vec![2, 2],
            vec![0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)],
        )
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Pmf::uniform(2).unwrap()), 1.0);
        assert_eq!(entropy(&Pmf::point_mass(3, 1).unwrap()), 0.0);
        let h = entropy(&Pmf::new(vec![0.9, 0.1]).unwrap());
        assert!((h - 0.468_995_593_589_281_2).abs() < 1e-12);
    }

    #[test]
    fn pmf_rejects_bad_mass() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![1.5, -0.5]).is_err());
        assert!(Pmf::new(vec![]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let indep = JointPmf::new(["a", "b"], vec![2, 2], vec![0.25; 4]).unwrap();
        assert_eq!(mutual_information(&indep, &[0], &[1]).unwrap(), 0.0);
        let copy = dsbs(0.0);
        assert!((mutual_information(&copy, &[0], &[1]).unwrap() - 1.0).abs() < 1e-15);
        let bsc = dsbs(0.1);
        let i = mutual_information(&bsc, &[0], &[1]).unwrap();
        assert!((i - (1.0 - binary_entropy(0.1))).abs() < 1e-12);
        assert!((i - 0.5310).abs() < 1e-4);
    }

    #[test]
    fn overlapping_groups_are_rejected() {
        let j = dsbs(0.2);
        assert!(matches!(
            mutual_information(&j, &[0, 1], &[1]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(conditional_mutual_information(&j, &[0], &[1], &[0]).is_err());
    }

    #[test]
    fn cmi_with_constant_condition_is_mi() {
        let base = dsbs(0.2);
        let mut probs = Vec::new();
        for &p in base.probs() {
            probs.push(p);
        }
        let j = JointPmf::new(["x", "y", "c"], vec![2, 2, 1], probs).unwrap();
        let cmi = conditional_mutual_information(&j, &[0], &[1], &[2]).unwrap();
        let mi = mutual_information(&base, &[0], &[1]).unwrap();
        assert!((cmi - mi).abs() < 1e-15);
    }

    #[test]
    fn conditioning_on_the_source_itself() {
        // X uniform, Y = X, reconstructions arbitrary functions of a coin
        let mut w = vec![0.0; 2 * 2 * 2 * 2];
        for x in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let flat = ((x * 2 + x) * 2 + a) * 2 + b;
                    w[flat] = 0.5 * [0.1, 0.2, 0.3, 0.4][a * 2 + b];
                }
            }
        }
        let j = JointPmf::new(["x", "y", "a", "b"], vec![2; 4], w).unwrap();
        assert_eq!(conditional_mutual_information(&j, &[0], &[2, 3], &[1]).unwrap(), 0.0);
    }

    #[test]
    fn distortion_examples() {
        let ham = DistortionMatrix::hamming(2);
        assert_eq!(expected_distortion(&dsbs(0.0), 0, 1, &ham).unwrap(), 0.0);
        let coin = JointPmf::new(["x", "xh"], vec![2, 2], vec![0.25; 4]).unwrap();
        assert_eq!(expected_distortion(&coin, 0, 1, &ham).unwrap(), 0.5);
        assert!((expected_distortion(&dsbs(0.1), 0, 1, &ham).unwrap() - 0.1).abs() < 1e-15);
        let wide = DistortionMatrix::new(vec![vec![0.0, 1.0, 2.0]; 2]).unwrap();
        assert!(matches!(
            expected_distortion(&coin, 0, 1, &wide),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn empirical_type_examples() {
        let t = empirical_type(&[vec![0, 1, 0, 1], vec![0, 1, 0, 1]]).unwrap();
        assert_eq!(t.probs(), &[0.5, 0.0, 0.0, 0.5]);
        let t = empirical_type(&[vec![0, 0, 0]]).unwrap();
        assert_eq!(t.probs(), &[1.0]);
        let t = empirical_type(&[vec![0, 0, 1, 1], vec![0, 1, 0, 1]]).unwrap();
        assert_eq!(t.probs(), &[0.25; 4]);
        assert!(empirical_type(&[vec![0, 1], vec![0]]).is_err());
        assert!(empirical_type(&[]).is_err());
        assert!(empirical_type(&[vec![]]).is_err());
    }

    #[test]
    fn total_variation_examples() {
        let p = JointPmf::new(["a"], vec![2], vec![0.6, 0.4]).unwrap();
        let q = JointPmf::new(["a"], vec![2], vec![0.5, 0.5]).unwrap();
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert!((total_variation(&p, &q).unwrap() - 0.1).abs() < 1e-15);
        let e0 = JointPmf::new(["a"], vec![2], vec![1.0, 0.0]).unwrap();
        let e1 = JointPmf::new(["a"], vec![2], vec![0.0, 1.0]).unwrap();
        assert_eq!(total_variation(&e0, &e1).unwrap(), 1.0);
        let r = JointPmf::new(["a"], vec![3], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(total_variation(&p, &r).is_err());
    }

    #[test]
    fn joint_json_round_trip() {
        let j = dsbs(0.25);
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.contains("\"vars\"") && s.contains("\"shape\"") && s.contains("\"probs\""));
        let back: JointPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        let bad = r#"{"vars":["x"],"shape":[2],"probs":[0.7,0.7]}"#;
        assert!(serde_json::from_str::<JointPmf>(bad).is_err());
    }

    #[test]
    fn marginal_keeps_requested_order() {
        let j = JointPmf::new(["a", "b"], vec![2, 3], vec![0.1, 0.2, 0.0, 0.3, 0.1, 0.3]).unwrap();
        let m = j.marginal(&[1, 0]).unwrap();
        assert_eq!(m.vars(), &["b".to_string(), "a".to_string()]);
        assert_eq!(m.get(&[2, 1]).unwrap(), 0.3);
        assert_eq!(m.get(&[1, 0]).unwrap(), 0.2);
    }
}
