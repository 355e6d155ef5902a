//! Per-feature empirical PDFs of two datasets over shared, equal-width bin
//! edges.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{invalid, Result};
use crate::math::{round_half_up, sqrt};

/// Mass added to every bin before renormalizing, so that log-ratios stay finite.
pub const SMOOTHING: f64 = 1e-10;

/// Histograms of one feature for both datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureHistogram {
    /// `bins + 1` ascending edges spanning the combined range.
    pub edges: Vec<f64>,
    pub pdf_a: Vec<f64>,
    pub pdf_b: Vec<f64>,
    /// The combined column was constant; both pdfs are `[1.0]`.
    pub degenerate: bool,
}

/// Joint histograms of every feature of a dataset pair.
#[derive(Debug, Clone, PartialEq)]
pub struct JointHistogramPair {
    pub features: Vec<FeatureHistogram>,
}

impl JointHistogramPair {
    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// The same pair seen from the other side.
    pub fn swapped(&self) -> Self {
        Self {
            features: self
                .features
                .iter()
                .map(|f| FeatureHistogram {
                    edges: f.edges.clone(),
                    pdf_a: f.pdf_b.clone(),
                    pdf_b: f.pdf_a.clone(),
                    degenerate: f.degenerate,
                })
                .collect(),
        }
    }
}

/// Default bin count: `round(√max(M_a, M_b))`, at least 2.
pub fn default_bins(m_a: usize, m_b: usize) -> usize {
    let m = m_a.max(m_b) as f64;
    (round_half_up(sqrt(m)) as usize).max(2)
}

/// Builds joint histograms for `a` and `b`.
///
/// Bins are half-open `[b_{k-1}, b_k)` except the last, which is closed.
/// Counts are divided by each dataset's size, then smoothed by
/// [`SMOOTHING`] and renormalized.
pub fn joint_histograms(a: &Dataset, b: &Dataset, bins: Option<usize>) -> Result<JointHistogramPair> {
    a.check_comparable(b)?;
    let k = match bins {
        Some(0) => return Err(invalid!("bin count must be positive")),
        Some(k) => k,
        None => default_bins(a.len(), b.len()),
    };
    let features = (0..a.dim())
        .map(|j| feature_histogram(&a.column(j), &b.column(j), k))
        .collect();
    Ok(JointHistogramPair { features })
}

fn feature_histogram(xa: &[f64], xb: &[f64], k: usize) -> FeatureHistogram {
    let (lo, hi) = xa
        .iter()
        .chain(xb)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo == hi {
        return FeatureHistogram {
            edges: vec![lo, hi],
            pdf_a: vec![1.0],
            pdf_b: vec![1.0],
            degenerate: true,
        };
    }
    let width = (hi - lo) / k as f64;
    let mut edges: Vec<f64> = (0..=k).map(|i| lo + width * i as f64).collect();
    edges[k] = hi;
    FeatureHistogram {
        pdf_a: smoothed_pdf(xa, &edges),
        pdf_b: smoothed_pdf(xb, &edges),
        edges,
        degenerate: false,
    }
}

fn bin_index(x: f64, edges: &[f64]) -> usize {
    let k = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[k]);
    if x >= hi {
        return k - 1;
    }
    let guess = (((x - lo) / (hi - lo)) * k as f64) as usize;
    let mut i = guess.min(k - 1);
    // the computed edges may disagree with the division by an ulp
    while i > 0 && x < edges[i] {
        i -= 1;
    }
    while i + 1 < k && x >= edges[i + 1] {
        i += 1;
    }
    i
}

fn smoothed_pdf(xs: &[f64], edges: &[f64]) -> Vec<f64> {
    let k = edges.len() - 1;
    let mut counts = vec![0usize; k];
    for &x in xs {
        counts[bin_index(x, edges)] += 1;
    }
    let m = xs.len() as f64;
    let norm = 1.0 + SMOOTHING * k as f64;
    counts
        .into_iter()
        .map(|c| (c as f64 / m + SMOOTHING) / norm)
        .collect()
}
