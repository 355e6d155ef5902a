//! Principal angles between the dominant linear subspaces of two datasets,
//! and the Grassmann, chordal and Asimov distances built on them.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::linalg::{principal_axes, singular_values, Matrix};
use crate::math::{acos, asin, sin, sqrt};

/// Default subspace dimension, capped by the feature count.
pub const DEFAULT_SUBSPACE_DIM: usize = 10;

const HALF_PI: f64 = core::f64::consts::FRAC_PI_2;

/// Principal angles in radians, ascending, each in `[0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    angles: Vec<f64>,
}

impl PrincipalAngles {
    /// Sorts and clamps the given angles into `[0, π/2]`.
    pub fn new(mut angles: Vec<f64>) -> Self {
        angles.iter_mut().for_each(|a| *a = a.clamp(0.0, HALF_PI));
        angles.sort_by(f64::total_cmp);
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Orthonormal basis (`N × k`) of the top-`k` principal directions of the
/// mean-centered data.
pub fn dominant_subspace(d: &Dataset, k: usize) -> Result<Matrix> {
    let centered = d.data().centered(&d.mean());
    Ok(principal_axes(&centered, k)?.axes)
}

/// Principal angles between the top-`k` subspaces of `a` and `b`.
pub fn principal_angles(a: &Dataset, b: &Dataset, k: usize) -> Result<PrincipalAngles> {
    a.check_comparable(b)?;
    let limit = a.len().min(b.len()).min(a.dim());
    if k == 0 || k > limit {
        return Err(invalid!(
            "subspace dimension {k} must be in 1..={limit} (min of M_a, M_b, N)"
        ));
    }
    let ua = dominant_subspace(a, k)?;
    let ub = dominant_subspace(b, k)?;
    angles_between_bases(&ua, &ub)
}

/// Principal angles between the column spans of two orthonormal bases.
///
/// Cosines come from the singular values of `UaᵀUb`, sines from those of
/// `Ub − Ua(UaᵀUb)`; each angle is taken from whichever is better conditioned.
pub fn angles_between_bases(ua: &Matrix, ub: &Matrix) -> Result<PrincipalAngles> {
    let cross = ua.transpose().matmul(ub)?;
    let cosines = singular_values(&cross);
    let projected = ua.matmul(&cross)?;
    let mut residual = ub.clone();
    for (r, p) in residual.as_mut_slice().iter_mut().zip(projected.as_slice()) {
        *r -= p;
    }
    let mut sines = singular_values(&residual);
    sines.sort_by(f64::total_cmp);
    let angles = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            let c = c.clamp(-1.0, 1.0);
            if c * c >= 0.5 {
                asin(s.clamp(0.0, 1.0))
            } else {
                acos(c)
            }
        })
        .collect();
    Ok(PrincipalAngles::new(angles))
}

/// `‖θ‖₂`.
pub fn grassmann(pa: &PrincipalAngles) -> f64 {
    sqrt(pa.angles.iter().map(|t| t * t).sum())
}

/// `√Σ sin²θ_i`.
pub fn chordal(pa: &PrincipalAngles) -> f64 {
    sqrt(pa.angles.iter().map(|&t| sin(t) * sin(t)).sum())
}

/// Largest principal angle.
pub fn asimov(pa: &PrincipalAngles) -> f64 {
    pa.angles.last().copied().unwrap_or(0.0)
}
