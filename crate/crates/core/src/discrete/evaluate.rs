use super::channel::{CascadeChannel, MultiuserChannel, TriangularChannel};
use super::RatePoint;
use crate::error::{Error, Result};
use crate::prob::{
    conditional_mutual_information, empirical_type_with_shape, expected_distortion,
    mutual_information, total_variation, DistortionMatrix, JointPmf,
};

/// `(I(X; X̂₁,X̂₂ | Y), I(X,Y; X̂₂))` with `(E d₁, E d₂)`.
pub fn cascade_rates(
    pxy: &JointPmf,
    ch: &CascadeChannel,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
) -> Result<RatePoint> {
    let j = ch.joint(pxy)?;
    let r1 = conditional_mutual_information(&j, &[0], &[2, 3], &[1])?;
    let r2 = mutual_information(&j, &[0, 1], &[3])?;
    let e1 = expected_distortion(&j, 0, 2, d1)?;
    let e2 = expected_distortion(&j, 0, 3, d2)?;
    RatePoint::new(vec![r1, r2], vec![e1, e2])
}

/// `(I(X; X̂₁,U | Y), I(X,Y; U), I(X; X̂₂ | U))` with `(E d₁, E d₂)`.
pub fn triangular_rates(
    pxy: &JointPmf,
    ch: &TriangularChannel,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
) -> Result<RatePoint> {
    triangular_rates_of_joint(&ch.joint(pxy)?, d1, d2)
}

/// The triangular rate expressions evaluated on any joint over the
/// variables `x, y, u, x1, x2`, factorized or not.
pub fn triangular_rates_of_joint(
    joint: &JointPmf,
    d1: &DistortionMatrix,
    d2: &DistortionMatrix,
) -> Result<RatePoint> {
    let idx = joint.indices_of(&["x", "y", "u", "x1", "x2"])?;
    let [x, y, u, a, b] = [idx[0], idx[1], idx[2], idx[3], idx[4]];
    let r1 = conditional_mutual_information(joint, &[x], &[a, u], &[y])?;
    let r2 = mutual_information(joint, &[x, y], &[u])?;
    let r3 = conditional_mutual_information(joint, &[x], &[b], &[u])?;
    let e1 = expected_distortion(joint, x, a, d1)?;
    let e2 = expected_distortion(joint, x, b, d2)?;
    RatePoint::new(vec![r1, r2, r3], vec![e1, e2])
}

/// Rates for `k` users that see the side information and `l` that do not,
/// `m = k + l` reconstructions in total:
///
/// * `Rᵢ = I(X; X̂ᵢ,…,X̂_{m−1},U | Y)` for `i ≤ k`,
/// * `Rⱼ = I(X,Y; X̂ⱼ,…,X̂_{m−1},U)` for `k < j ≤ m`,
/// * `R_{m+1} = I(X; X̂_m | U)`.
pub fn multiuser_rates(
    pxy: &JointPmf,
    ch: &MultiuserChannel,
    k: usize,
    l: usize,
    distortions: &[DistortionMatrix],
) -> Result<RatePoint> {
    let m = ch.recon_sizes.len();
    if k == 0 || l == 0 || k + l != m {
        return Err(Error::InvalidArgument(format!(
            "k = {k}, l = {l} does not match a channel with {m} reconstructions"
        )));
    }
    if distortions.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{} distortion matrices for {m} users",
            distortions.len()
        )));
    }
    let j = ch.joint(pxy)?;
    let (x, y, u) = (0, 1, m + 2);
    let recon = |i: usize| i + 1; // x̂ᵢ for 1-based i
    // x̂ᵢ,…,x̂_{m−1}, u
    let tail = |i: usize| -> Vec<usize> {
        let mut v: Vec<usize> = (i..m).map(recon).collect();
        v.push(u);
        v
    };
    let mut rates = Vec::with_capacity(m + 1);
    for i in 1..=k {
        rates.push(conditional_mutual_information(&j, &[x], &tail(i), &[y])?);
    }
    for jdx in k + 1..=m {
        rates.push(mutual_information(&j, &[x, y], &tail(jdx))?);
    }
    rates.push(conditional_mutual_information(&j, &[x], &[recon(m)], &[u])?);
    let dist = distortions
        .iter()
        .enumerate()
        .map(|(i, d)| expected_distortion(&j, x, recon(i + 1), d))
        .collect::<Result<Vec<_>>>()?;
    RatePoint::new(rates, dist)
}

/// Rates needed to coordinate `(X̂₁, X̂₂)` with `(X, Y) ~ P₀` according to
/// `target`; no distortions are attached.
pub fn coordination_rates(p0: &JointPmf, target: &CascadeChannel) -> Result<RatePoint> {
    let j = target.joint(p0)?;
    let r1 = conditional_mutual_information(&j, &[0], &[2, 3], &[1])?;
    let r2 = mutual_information(&j, &[0, 1], &[3])?;
    RatePoint::new(vec![r1, r2], Vec::new())
}

/// Total variation between the joint type of `(x, y, x̂₁, x̂₂)` sequences and
/// the coordination target `P₀·target`.
pub fn empirical_coordination_distance(
    sequences: [&[usize]; 4],
    p0: &JointPmf,
    target: &CascadeChannel,
) -> Result<f64> {
    let want = target.joint(p0)?;
    let seqs: Vec<Vec<usize>> = sequences.iter().map(|s| s.to_vec()).collect();
    let got = empirical_type_with_shape(&seqs, want.shape())?;
    let got = JointPmf::new(want.vars().to_vec(), want.shape().to_vec(), got.probs().to_vec())?;
    total_variation(&got, &want)
}
