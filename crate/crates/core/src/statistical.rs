//! Distribution-level distances.
//!
//! The f-divergences (KL, JS, Hellinger, total variation) consume a
//! [`JointHistogramPair`]; the integral probability metrics (Wasserstein-1,
//! Kolmogorov-Smirnov, energy, MMD) consume raw samples. Feature-wise metrics
//! are averaged over features into a [`FeatureAggregation`].

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::geometric::canonical;
use crate::histogram::JointHistogramPair;
use crate::linalg::{euclidean, squared_euclidean};
use crate::math::{exp, ln, sqrt, LN_2};

/// Per-feature values and their (optionally weighted) average.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureAggregation {
    pub per_feature: Vec<f64>,
    pub mean: f64,
    /// Normalized to sum to one when present.
    pub weights: Option<Vec<f64>>,
}

impl FeatureAggregation {
    /// Averages `per_feature`, weighting by `weights` when given.
    ///
    /// Weights must be non-negative with a positive sum; they are normalized.
    pub fn new(per_feature: Vec<f64>, weights: Option<&[f64]>) -> Result<Self> {
        match weights {
            None => {
                let mean = per_feature.iter().sum::<f64>() / per_feature.len() as f64;
                Ok(Self {
                    per_feature,
                    mean,
                    weights: None,
                })
            }
            Some(w) => {
                if w.len() != per_feature.len() {
                    return Err(invalid!(
                        "{} feature weights given for {} features",
                        w.len(),
                        per_feature.len()
                    ));
                }
                if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                    return Err(invalid!("feature weights must be finite and non-negative"));
                }
                let total: f64 = w.iter().sum();
                if total <= 0.0 {
                    return Err(invalid!("feature weights sum to zero"));
                }
                let w: Vec<f64> = w.iter().map(|x| x / total).collect();
                let mean = per_feature.iter().zip(&w).map(|(v, w)| v * w).sum();
                Ok(Self {
                    per_feature,
                    mean,
                    weights: Some(w),
                })
            }
        }
    }
}

fn uniform_mean(h: &JointHistogramPair, f: impl Fn(&[f64], &[f64]) -> f64) -> f64 {
    let total: f64 = h.features.iter().map(|x| f(&x.pdf_a, &x.pdf_b)).sum();
    total / h.features.len() as f64
}

fn kl_1d(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * ln(pi / qi))
        .sum()
}

fn js_1d(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    (0.5 * kl_1d(p, &m) + 0.5 * kl_1d(q, &m)).clamp(0.0, LN_2)
}

fn hellinger_1d(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| {
            let d = sqrt(*a) - sqrt(*b);
            d * d
        })
        .sum();
    (sqrt(s) / core::f64::consts::SQRT_2).min(1.0)
}

fn tv_1d(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()).min(1.0)
}

/// `Σ p_a ln(p_a / p_b)` per feature, averaged. Not symmetric.
pub fn kl_divergence(h: &JointHistogramPair) -> f64 {
    uniform_mean(h, kl_1d).max(0.0)
}

/// Jensen-Shannon divergence in nats, bounded by `ln 2`.
pub fn jensen_shannon(h: &JointHistogramPair) -> f64 {
    uniform_mean(h, js_1d)
}

/// Hellinger distance `(1/√2)·‖√p − √q‖₂`, bounded by 1.
pub fn hellinger(h: &JointHistogramPair) -> f64 {
    uniform_mean(h, hellinger_1d)
}

/// Total variation `½ Σ |p − q|`, bounded by 1.
pub fn total_variation(h: &JointHistogramPair) -> f64 {
    uniform_mean(h, tv_1d)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Exact 1-Wasserstein distance between two empirical distributions given as
/// sorted samples.
///
/// Both quantile functions are step functions with breakpoints at `i/M_a` and
/// `j/M_b`; the integral of their gap is accumulated while walking the merged
/// breakpoints. Breakpoints are compared as integers (`i·M_b` vs `j·M_a`).
pub fn wasserstein1_sorted(x: &[f64], y: &[f64]) -> f64 {
    let (ma, mb) = (x.len() as u128, y.len() as u128);
    let total = ma * mb;
    let (mut i, mut j) = (0usize, 0usize);
    let mut t: u128 = 0;
    let mut acc = 0.0;
    while i < x.len() && j < y.len() {
        let next_a = (i as u128 + 1) * mb;
        let next_b = (j as u128 + 1) * ma;
        let next = next_a.min(next_b);
        acc += (next - t) as f64 * (x[i] - y[j]).abs();
        t = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    acc / total as f64
}

/// Per-feature exact 1-Wasserstein distances, aggregated.
pub fn wasserstein1(a: &Dataset, b: &Dataset, weights: Option<&[f64]>) -> Result<FeatureAggregation> {
    a.check_comparable(b)?;
    let per_feature = (0..a.dim())
        .map(|j| wasserstein1_sorted(&sorted(a.column(j)), &sorted(b.column(j))))
        .collect();
    FeatureAggregation::new(per_feature, weights)
}

/// Two-sample Kolmogorov-Smirnov statistic of sorted samples.
pub fn kolmogorov_smirnov_sorted(x: &[f64], y: &[f64]) -> f64 {
    let (ma, mb) = (x.len() as i128, y.len() as i128);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: i128 = 0;
    while i < x.len() || j < y.len() {
        let v = match (x.get(i), y.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        // |i/M_a − j/M_b| scaled by M_a·M_b
        best = best.max((i as i128 * mb - j as i128 * ma).abs());
    }
    best as f64 / (ma * mb) as f64
}

/// Per-feature KS statistics, uniformly averaged.
pub fn kolmogorov_smirnov(a: &Dataset, b: &Dataset) -> Result<FeatureAggregation> {
    a.check_comparable(b)?;
    let per_feature = (0..a.dim())
        .map(|j| kolmogorov_smirnov_sorted(&sorted(a.column(j)), &sorted(b.column(j))))
        .collect();
    FeatureAggregation::new(per_feature, None)
}

fn mean_cross(a: &Dataset, b: &Dataset, f: impl Fn(&[f64], &[f64]) -> f64) -> f64 {
    let (a, b) = canonical(a.data(), b.data());
    let mut s = 0.0;
    for x in a.iter_rows() {
        for y in b.iter_rows() {
            s += f(x, y);
        }
    }
    s / (a.rows() as f64 * b.rows() as f64)
}

/// Energy distance (V-statistic) on the full multivariate points.
pub fn energy_distance(a: &Dataset, b: &Dataset) -> Result<f64> {
    a.check_comparable(b)?;
    let ab = mean_cross(a, b, euclidean);
    let (aa, bb) = (mean_cross(a, a, euclidean), mean_cross(b, b, euclidean));
    let (lo, hi) = if aa.total_cmp(&bb).is_le() { (aa, bb) } else { (bb, aa) };
    Ok((2.0 * ab - lo - hi).max(0.0))
}

/// Kernel used by [`mmd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MmdKernel {
    Linear,
    /// Gaussian kernel with the median-heuristic bandwidth.
    Rbf,
}

/// Median of the pairwise distances over all distinct pairs of the pooled
/// sample (average of the two middle values for an even count).
pub fn median_pairwise_distance(a: &Dataset, b: &Dataset) -> f64 {
    let (a, b) = canonical(a.data(), b.data());
    let pooled: Vec<&[f64]> = a.iter_rows().chain(b.iter_rows()).collect();
    let n = pooled.len();
    let mut d = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(euclidean(pooled[i], pooled[j]));
        }
    }
    if d.is_empty() {
        return 0.0;
    }
    let mid = d.len() / 2;
    let (_, &mut upper, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    if d.len() % 2 == 1 {
        upper
    } else {
        let lower = d[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Maximum mean discrepancy (biased V-statistic), clamped at zero.
pub fn mmd(a: &Dataset, b: &Dataset, kernel: MmdKernel) -> Result<f64> {
    a.check_comparable(b)?;
    match kernel {
        MmdKernel::Linear => Ok(squared_euclidean(&a.mean(), &b.mean())),
        MmdKernel::Rbf => {
            let sigma = median_pairwise_distance(a, b);
            if sigma == 0.0 {
                return Ok(0.0);
            }
            let gamma = 1.0 / (2.0 * sigma * sigma);
            let k = |x: &[f64], y: &[f64]| exp(-gamma * squared_euclidean(x, y));
            let (kaa, kbb) = (mean_cross(a, a, k), mean_cross(b, b, k));
            let (lo, hi) = if kaa.total_cmp(&kbb).is_le() { (kaa, kbb) } else { (kbb, kaa) };
            let v = lo + hi - 2.0 * mean_cross(a, b, k);
            Ok(v.max(0.0))
        }
    }
}
