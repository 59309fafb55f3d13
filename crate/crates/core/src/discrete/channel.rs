//! Conditional pmfs used as test channels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{JointPmf, MASS_TOLERANCE};

/// A row-stochastic matrix: one pmf over `cols` outcomes per input row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Stochastic {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl Stochastic {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged conditional pmf".into()));
        }
        let n = rows.len();
        Self::from_flat(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("empty conditional pmf".into()));
        }
        if probs.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} conditional pmf",
                probs.len()
            )));
        }
        for (i, row) in probs.chunks(cols).enumerate() {
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidDistribution(format!("row {i} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > MASS_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("row {i} sums to {total}")));
            }
        }
        Ok(Self { rows, cols, probs })
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self { rows, cols, probs: vec![1.0 / cols as f64; rows * cols] }
    }

    /// Every row a point mass at `f(row)`.
    pub fn deterministic(rows: usize, cols: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        let mut probs = vec![0.0; rows * cols];
        for r in 0..rows {
            let c = f(r);
            if c >= cols {
                return Err(Error::InvalidArgument(format!("output {c} outside 0..{cols}")));
            }
            probs[r * cols + c] = 1.0;
        }
        Ok(Self { rows, cols, probs })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.probs[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.probs[r * self.cols + c]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.probs
    }

    /// `θ·self + (1−θ)·other`.
    pub fn mix(&self, other: &Self, theta: f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("mixing conditional pmfs of different shape".into()));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("mixing weight {theta} outside [0, 1]")));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| theta * a + (1.0 - theta) * b)
            .collect();
        Ok(Self { rows: self.rows, cols: self.cols, probs })
    }
}

impl TryFrom<Vec<Vec<f64>>> for Stochastic {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<Stochastic> for Vec<Vec<f64>> {
    fn from(s: Stochastic) -> Self {
        s.probs.chunks(s.cols).map(<[f64]>::to_vec).collect()
    }
}

/// Alphabet sizes `(|X|, |Y|)` of a two-variable source pmf.
pub(crate) fn source_shape(pxy: &JointPmf) -> Result<(usize, usize)> {
    match pxy.shape() {
        &[nx, ny] => Ok((nx, ny)),
        s => Err(Error::DimensionMismatch(format!(
            "source pmf must have two variables (x, y), got shape {s:?}"
        ))),
    }
}

fn expect_shape(what: &str, got: (usize, usize), want: (usize, usize)) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!(
            "{what} is defined for |X|={}, |Y|={} but the source has |X|={}, |Y|={}",
            got.0, got.1, want.0, want.1
        )));
    }
    Ok(())
}

/// `P(x̂₁, x̂₂ | x, y)`; row `x·|Y| + y`, column `x̂₁·|X̂₂| + x̂₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CascadeRepr", into = "CascadeRepr")]
pub struct CascadeChannel {
    nx: usize,
    ny: usize,
    n1: usize,
    n2: usize,
    cond: Stochastic,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CascadeRepr {
    shape: [usize; 4],
    rows: Stochastic,
}

impl TryFrom<CascadeRepr> for CascadeChannel {
    type Error = Error;

    fn try_from(r: CascadeRepr) -> Result<Self> {
        let [nx, ny, n1, n2] = r.shape;
        Self::new(nx, ny, n1, n2, r.rows)
    }
}

impl From<CascadeChannel> for CascadeRepr {
    fn from(c: CascadeChannel) -> Self {
        Self { shape: [c.nx, c.ny, c.n1, c.n2], rows: c.cond }
    }
}

impl CascadeChannel {
    pub fn new(nx: usize, ny: usize, n1: usize, n2: usize, cond: Stochastic) -> Result<Self> {
        if cond.rows() != nx * ny || cond.cols() != n1 * n2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a {}x{} conditional pmf, got {}x{}",
                nx * ny,
                n1 * n2,
                cond.rows(),
                cond.cols()
            )));
        }
        Ok(Self { nx, ny, n1, n2, cond })
    }

    pub fn from_fn(
        nx: usize,
        ny: usize,
        n1: usize,
        n2: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut probs = Vec::with_capacity(nx * ny * n1 * n2);
        for x in 0..nx {
            for y in 0..ny {
                for a in 0..n1 {
                    for b in 0..n2 {
                        probs.push(f(x, y, a, b));
                    }
                }
            }
        }
        Self::new(nx, ny, n1, n2, Stochastic::from_flat(nx * ny, n1 * n2, probs)?)
    }

    /// `(x̂₁, x̂₂) = f(x, y)` with probability one.
    pub fn deterministic(
        nx: usize,
        ny: usize,
        n1: usize,
        n2: usize,
        f: impl Fn(usize, usize) -> (usize, usize),
    ) -> Result<Self> {
        let cond = Stochastic::deterministic(nx * ny, n1 * n2, |r| {
            let (a, b) = f(r / ny, r % ny);
            if a >= n1 || b >= n2 {
                usize::MAX
            } else {
                a * n2 + b
            }
        })?;
        Self::new(nx, ny, n1, n2, cond)
    }

    pub fn uniform(nx: usize, ny: usize, n1: usize, n2: usize) -> Self {
        Self { nx, ny, n1, n2, cond: Stochastic::uniform(nx * ny, n1 * n2) }
    }

    /// `[|X|, |Y|, |X̂₁|, |X̂₂|]`.
    pub fn shape(&self) -> [usize; 4] {
        [self.nx, self.ny, self.n1, self.n2]
    }

    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.cond.get(x * self.ny + y, a * self.n2 + b)
    }

    pub fn conditional(&self) -> &Stochastic {
        &self.cond
    }

    pub fn mix(&self, other: &Self, theta: f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch("mixing channels of different shape".into()));
        }
        Ok(Self {
            nx: self.nx,
            ny: self.ny,
            n1: self.n1,
            n2: self.n2,
            cond: self.cond.mix(&other.cond, theta)?,
        })
    }

    /// `P(x, y)·P(x̂₁, x̂₂ | x, y)` over variables `x, y, x1, x2`.
    pub fn joint(&self, pxy: &JointPmf) -> Result<JointPmf> {
        expect_shape("the channel", (self.nx, self.ny), source_shape(pxy)?)?;
        let mut probs = Vec::with_capacity(self.cond.as_flat().len());
        for (r, &p) in pxy.probs().iter().enumerate() {
            probs.extend(self.cond.row(r).iter().map(|q| p * q));
        }
        JointPmf::new(
            ["x", "y", "x1", "x2"],
            vec![self.nx, self.ny, self.n1, self.n2],
            probs,
        )
    }
}

/// `P(x̂₁, u | x, y)·P(x̂₂ | x, u)`.
///
/// `cond1` has row `x·|Y| + y` and column `x̂₁·|U| + u`; `cond2` has row
/// `x·|U| + u` and column `x̂₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TriangularRepr", into = "TriangularRepr")]
pub struct TriangularChannel {
    nx: usize,
    ny: usize,
    n1: usize,
    nu: usize,
    n2: usize,
    cond1: Stochastic,
    cond2: Stochastic,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangularRepr {
    /// `[|X|, |Y|, |X̂₁|, |U|, |X̂₂|]`
    shape: [usize; 5],
    cond1: Stochastic,
    cond2: Stochastic,
}

impl TryFrom<TriangularRepr> for TriangularChannel {
    type Error = Error;

    fn try_from(r: TriangularRepr) -> Result<Self> {
        let [nx, ny, n1, nu, n2] = r.shape;
        Self::new(nx, ny, n1, nu, n2, r.cond1, r.cond2)
    }
}

impl From<TriangularChannel> for TriangularRepr {
    fn from(c: TriangularChannel) -> Self {
        Self { shape: [c.nx, c.ny, c.n1, c.nu, c.n2], cond1: c.cond1, cond2: c.cond2 }
    }
}

impl TriangularChannel {
    pub fn new(
        nx: usize,
        ny: usize,
        n1: usize,
        nu: usize,
        n2: usize,
        cond1: Stochastic,
        cond2: Stochastic,
    ) -> Result<Self> {
        if cond1.rows() != nx * ny || cond1.cols() != n1 * nu {
            return Err(Error::DimensionMismatch(format!(
                "first-stage pmf must be {}x{}, got {}x{}",
                nx * ny,
                n1 * nu,
                cond1.rows(),
                cond1.cols()
            )));
        }
        if cond2.rows() != nx * nu || cond2.cols() != n2 {
            return Err(Error::DimensionMismatch(format!(
                "second-stage pmf must be {}x{n2}, got {}x{}",
                nx * nu,
                cond2.rows(),
                cond2.cols()
            )));
        }
        let bound = Self::max_u_size(nx, ny, n1, n2);
        if nu > bound {
            return Err(Error::InvalidArgument(format!(
                "|U| = {nu} exceeds the cardinality bound {bound}"
            )));
        }
        Ok(Self { nx, ny, n1, nu, n2, cond1, cond2 })
    }

    /// `|X||Y||X̂₁||X̂₂| + 2`.
    pub fn max_u_size(nx: usize, ny: usize, n1: usize, n2: usize) -> usize {
        nx * ny * n1 * n2 + 2
    }

    /// `[|X|, |Y|, |X̂₁|, |U|, |X̂₂|]`.
    pub fn shape(&self) -> [usize; 5] {
        [self.nx, self.ny, self.n1, self.nu, self.n2]
    }

    pub fn u_size(&self) -> usize {
        self.nu
    }

    pub fn first_stage(&self) -> &Stochastic {
        &self.cond1
    }

    pub fn second_stage(&self) -> &Stochastic {
        &self.cond2
    }

    /// The joint over variables `x, y, u, x1, x2`.
    pub fn joint(&self, pxy: &JointPmf) -> Result<JointPmf> {
        expect_shape("the channel", (self.nx, self.ny), source_shape(pxy)?)?;
        let (ny, n1, nu, n2) = (self.ny, self.n1, self.nu, self.n2);
        let mut probs = vec![0.0; self.nx * ny * nu * n1 * n2];
        for x in 0..self.nx {
            for y in 0..ny {
                let p = pxy.probs()[x * ny + y];
                for u in 0..nu {
                    for a in 0..n1 {
                        let pa = p * self.cond1.get(x * ny + y, a * nu + u);
                        for b in 0..n2 {
                            let flat = (((x * ny + y) * nu + u) * n1 + a) * n2 + b;
                            probs[flat] = pa * self.cond2.get(x * nu + u, b);
                        }
                    }
                }
            }
        }
        JointPmf::new(["x", "y", "u", "x1", "x2"], vec![self.nx, ny, nu, n1, n2], probs)
    }

    /// Factor an arbitrary joint over `x, y, u, x1, x2` (any variable order)
    /// into the source pmf and the channel `P(x̂₁, u | x, y)·P(x̂₂ | x, u)`
    /// built from its marginals. Conditionals on zero-probability contexts
    /// are uniform.
    pub fn from_joint(joint: &JointPmf) -> Result<(JointPmf, Self)> {
        let idx = joint.indices_of(&["x", "y", "u", "x1", "x2"])?;
        if joint.num_vars() != 5 {
            return Err(Error::DimensionMismatch(format!(
                "expected exactly the variables x, y, u, x1, x2, got {:?}",
                joint.vars()
            )));
        }
        let [ix, iy, iu, i1, i2] = [idx[0], idx[1], idx[2], idx[3], idx[4]];
        let pxy = joint.marginal(&[ix, iy])?;
        let pxu = joint.marginal(&[ix, iu])?;
        let pxyau = joint.marginal(&[ix, iy, i1, iu])?;
        let pxub = joint.marginal(&[ix, iu, i2])?;
        let shape = joint.shape();
        let (nx, ny, nu, n1, n2) = (shape[ix], shape[iy], shape[iu], shape[i1], shape[i2]);

        let conditional = |num: &[f64], den: &[f64], cols: usize| -> Result<Stochastic> {
            let mut probs = Vec::with_capacity(num.len());
            for (r, &d) in den.iter().enumerate() {
                let row = &num[r * cols..(r + 1) * cols];
                if d > 0.0 {
                    let total: f64 = row.iter().sum();
                    probs.extend(row.iter().map(|v| v / total));
                } else {
                    probs.extend(std::iter::repeat_n(1.0 / cols as f64, cols));
                }
            }
            Stochastic::from_flat(den.len(), cols, probs)
        };
        let cond1 = conditional(pxyau.probs(), pxy.probs(), n1 * nu)?;
        let cond2 = conditional(pxub.probs(), pxu.probs(), n2)?;
        let source = JointPmf::new(["x", "y"], vec![nx, ny], pxy.probs().to_vec())?;
        Ok((source, Self::new(nx, ny, n1, nu, n2, cond1, cond2)?))
    }
}

/// `P(x̂₁, …, x̂_m, u | x, y)` for `m = k + l` reconstructions; row
/// `x·|Y| + y`, columns row-major over `(x̂₁, …, x̂_m, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiuserChannel {
    pub x_size: usize,
    pub y_size: usize,
    pub recon_sizes: Vec<usize>,
    pub u_size: usize,
    pub cond: Stochastic,
}

impl MultiuserChannel {
    pub fn new(
        x_size: usize,
        y_size: usize,
        recon_sizes: Vec<usize>,
        u_size: usize,
        cond: Stochastic,
    ) -> Result<Self> {
        let ch = Self { x_size, y_size, recon_sizes, u_size, cond };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        let cols: usize = self.recon_sizes.iter().product::<usize>() * self.u_size;
        if self.recon_sizes.is_empty() || cols == 0 {
            return Err(Error::InvalidArgument("multiuser channel needs reconstructions".into()));
        }
        if self.cond.rows() != self.x_size * self.y_size || self.cond.cols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "expected a {}x{cols} conditional pmf, got {}x{}",
                self.x_size * self.y_size,
                self.cond.rows(),
                self.cond.cols()
            )));
        }
        Ok(())
    }

    /// The joint over `x, y, x1, …, xm, u`.
    pub fn joint(&self, pxy: &JointPmf) -> Result<JointPmf> {
        self.validate()?;
        expect_shape("the channel", (self.x_size, self.y_size), source_shape(pxy)?)?;
        let mut probs = Vec::with_capacity(self.cond.as_flat().len());
        for (r, &p) in pxy.probs().iter().enumerate() {
            probs.extend(self.cond.row(r).iter().map(|q| p * q));
        }
        let m = self.recon_sizes.len();
        let mut vars = vec!["x".to_string(), "y".to_string()];
        vars.extend((1..=m).map(|i| format!("x{i}")));
        vars.push("u".into());
        let mut shape = vec![self.x_size, self.y_size];
        shape.extend(&self.recon_sizes);
        shape.push(self.u_size);
        JointPmf::new(vars, shape, probs)
    }
}
