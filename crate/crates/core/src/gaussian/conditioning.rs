//! Conditional variances in linear-Gaussian models.
//!
//! Every quantity is a linear combination of mutually independent zero-mean
//! Gaussian sources. Sources may have infinite variance; an observation that
//! carries such a source is only useful through combinations that cancel it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `Var(target | observations)` where `target` and each observation are
/// coefficient vectors over independent sources with the given variances.
pub fn conditional_variance(
    source_variances: &[f64],
    target: &[f64],
    observations: &[Vec<f64>],
) -> Result<f64> {
    let k = source_variances.len();
    if target.len() != k || observations.iter().any(|o| o.len() != k) {
        return Err(Error::DimensionMismatch(format!(
            "coefficient vectors must have {k} entries"
        )));
    }
    if source_variances.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::InvalidArgument("source variances must be nonnegative".into()));
    }

    let mut rows: Vec<Vec<f64>> = observations.to_vec();
    let infinite: Vec<usize> = (0..k).filter(|&j| source_variances[j].is_infinite()).collect();
    for &j in &infinite {
        if target[j] != 0.0 {
            return Ok(f64::INFINITY);
        }
        let pivot = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r[j] != 0.0)
            .max_by(|a, b| a.1[j].abs().total_cmp(&b.1[j].abs()))
            .map(|(i, _)| i);
        let Some(p) = pivot else { continue };
        let pivot_row = rows.swap_remove(p);
        for r in &mut rows {
            if r[j] != 0.0 {
                let f = r[j] / pivot_row[j];
                for (c, v) in r.iter_mut().enumerate() {
                    *v -= f * pivot_row[c];
                }
                r[j] = 0.0;
            }
        }
    }

    let finite: Vec<usize> = (0..k).filter(|j| !infinite.contains(j)).collect();
    let var = |j: usize| source_variances[j];
    let prior: f64 = finite.iter().map(|&j| target[j] * target[j] * var(j)).sum();
    rows.retain(|r| finite.iter().any(|&j| r[j] != 0.0));
    if rows.is_empty() {
        return Ok(prior);
    }

    let m = rows.len();
    let cov = DMatrix::from_fn(m, m, |a, b| {
        finite.iter().map(|&j| rows[a][j] * rows[b][j] * var(j)).sum()
    });
    let cross = DVector::from_fn(m, |a, _| {
        finite.iter().map(|&j| rows[a][j] * target[j] * var(j)).sum()
    });
    let explained: f64 = match cov.clone().cholesky() {
        Some(ch) => cross.dot(&ch.solve(&cross)),
        None => {
            let pinv = cov
                .pseudo_inverse(1e-14)
                .map_err(|e| Error::Singular(e.to_string()))?;
            cross.dot(&(pinv * &cross))
        }
    };
    Ok((prior - explained).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_observation_in_noise() {
        // X ~ N(0,1), Y = X + Z with Var Z = 1
        let v = conditional_variance(&[1.0, 1.0], &[1.0, 0.0], &[vec![1.0, 1.0]]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn no_observations_give_the_prior() {
        let v = conditional_variance(&[4.0, 1.0], &[1.0, 0.0], &[]).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn infinite_noise_cancels_between_observations() {
        // Y = X + Z, W = 2X + Z + N with Var Z = inf
        let v = conditional_variance(
            &[1.0, f64::INFINITY, 1.0],
            &[1.0, 0.0, 0.0],
            &[vec![1.0, 1.0, 0.0], vec![2.0, 1.0, 1.0]],
        )
        .unwrap();
        // W - Y = X + N
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn infinite_noise_alone_is_useless() {
        let v = conditional_variance(
            &[2.0, f64::INFINITY],
            &[1.0, 0.0],
            &[vec![1.0, 1.0]],
        )
        .unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn redundant_observations_fall_back_to_pseudo_inverse() {
        let v = conditional_variance(
            &[1.0, 1.0],
            &[1.0, 0.0],
            &[vec![1.0, 1.0], vec![2.0, 2.0]],
        )
        .unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }
}
