//! Label-aware dataset distance and the Proxy-A distance.
//!
//! The label-aware distance splits both datasets by label, compares the
//! per-label subsets with a base distance, and charges half of a group-wide
//! penalty `P_l` for every label present in only one of the two datasets.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, DatasetGroup, Label};
use crate::error::{invalid, Result};
use crate::geometric::{self, PointMetric};
use crate::linalg::dot;
use crate::math::{exp, round_half_up, sqrt};
use crate::statistical;

/// Per-label penalties `P_l`, computed once over a whole group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelPenaltyTable {
    penalties: BTreeMap<Label, f64>,
}

impl LabelPenaltyTable {
    pub fn from_map(penalties: BTreeMap<Label, f64>) -> Self {
        Self { penalties }
    }

    pub fn get(&self, label: Label) -> Option<f64> {
        self.penalties.get(&label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, f64)> + '_ {
        self.penalties.iter().map(|(&l, &p)| (l, p))
    }

    pub fn len(&self) -> usize {
        self.penalties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.penalties.is_empty()
    }
}

/// `P_l` = largest distance between any two points labeled `l`, anywhere in
/// the group (pairs within one dataset included).
pub fn penalty_table(group: &DatasetGroup, metric: PointMetric) -> Result<LabelPenaltyTable> {
    let mut by_label: BTreeMap<Label, Vec<&[f64]>> = BTreeMap::new();
    for d in group.datasets() {
        let labels = d.require_labels("penalty table")?;
        for (row, &l) in d.rows().zip(labels) {
            by_label.entry(l).or_default().push(row);
        }
    }
    let mut penalties = BTreeMap::new();
    for (label, points) in by_label {
        if points.len() == 1 {
            log::info!("label {label} has a single point in the group; P_l = 0");
        }
        let mut best = 0.0f64;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                best = best.max(metric.distance(points[i], points[j]));
            }
        }
        penalties.insert(label, best);
    }
    Ok(LabelPenaltyTable { penalties })
}

/// Base distance applied to per-label subsets.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", deny_unknown_fields))]
pub enum LabelAwareBase {
    CentroidEuclidean,
    PairwiseEuclidean,
    ClusterEuclidean { k: usize, seed: u64 },
    Cosine,
    /// Feature-averaged 1-Wasserstein.
    Wasserstein,
}

impl LabelAwareBase {
    pub fn distance(&self, a: &Dataset, b: &Dataset) -> Result<f64> {
        match *self {
            LabelAwareBase::CentroidEuclidean => geometric::centroid_euclidean(a, b),
            LabelAwareBase::PairwiseEuclidean => geometric::pairwise_euclidean(a, b),
            LabelAwareBase::ClusterEuclidean { k, seed } => {
                if a.len() < k || b.len() < k {
                    log::info!(
                        "label subset too small for {k} clusters ({} / {} points); using centroid distance",
                        a.len(),
                        b.len()
                    );
                    geometric::centroid_euclidean(a, b)
                } else {
                    geometric::cluster_euclidean(a, b, k, seed)
                }
            }
            LabelAwareBase::Cosine => geometric::cosine_distance(a, b),
            LabelAwareBase::Wasserstein => Ok(statistical::wasserstein1(a, b, None)?.mean),
        }
    }
}

/// Label-aware distance between two labeled datasets.
///
/// Shared labels contribute `base(a_l, b_l)`, labels in only one dataset
/// contribute `P_l / 2`; the result is the mean over `L_a ∪ L_b`.
pub fn label_aware_distance(
    a: &Dataset,
    b: &Dataset,
    table: &LabelPenaltyTable,
    base: LabelAwareBase,
) -> Result<f64> {
    a.check_comparable(b)?;
    a.require_labels("label-aware distance")?;
    b.require_labels("label-aware distance")?;
    let (la, lb) = (a.label_set(), b.label_set());
    let union: Vec<Label> = la.union(&lb).copied().collect();
    let mut total = 0.0;
    for &l in &union {
        total += match (a.restrict_to_label(l), b.restrict_to_label(l)) {
            (Some(sa), Some(sb)) => base.distance(&sa, &sb)?,
            _ => {
                table
                    .get(l)
                    .ok_or_else(|| invalid!("penalty table has no entry for label {l}"))?
                    / 2.0
            }
        };
    }
    Ok(total / union.len() as f64)
}

const PAD_MIN_POINTS: usize = 10;
const PAD_TRAIN_FRACTION: f64 = 0.7;
const PAD_L2: f64 = 1e-3;
const PAD_EPOCHS: usize = 500;

/// Proxy-A distance `clamp(2(1 − 2ε), 0, 2)`, where `ε` is the balanced test
/// error of a logistic-regression classifier separating `a` from `b`.
///
/// Each dataset is split 70/30 (seeded shuffle), features are standardized on
/// the training split, and the model is fitted by full-batch gradient descent
/// with class-balanced sample weights and an L2 penalty. The pair is put in a
/// canonical order first, so swapping the arguments gives the same value.
pub fn proxy_a_distance(a: &Dataset, b: &Dataset, seed: u64) -> Result<f64> {
    a.check_comparable(b)?;
    if a.len() < PAD_MIN_POINTS || b.len() < PAD_MIN_POINTS {
        return Err(invalid!(
            "Proxy-A distance needs at least {PAD_MIN_POINTS} points per dataset"
        ));
    }
    let (a, b) = if core::ptr::eq(geometric::canonical(a.data(), b.data()).0, a.data()) {
        (a, b)
    } else {
        (b, a)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train_a, test_a) = split(a.len(), &mut rng);
    let (train_b, test_b) = split(b.len(), &mut rng);

    let n = a.dim();
    let train_rows: Vec<&[f64]> = train_a
        .iter()
        .map(|&i| a.row(i))
        .chain(train_b.iter().map(|&i| b.row(i)))
        .collect();
    let (mean, scale) = standardizer(&train_rows, n);
    let prep = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(&mean)
            .zip(&scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    };
    let xs: Vec<Vec<f64>> = train_rows.iter().map(|r| prep(r)).collect();
    let ys: Vec<f64> = core::iter::repeat_n(0.0, train_a.len())
        .chain(core::iter::repeat_n(1.0, train_b.len()))
        .collect();
    let sw: Vec<f64> = core::iter::repeat_n(0.5 / train_a.len() as f64, train_a.len())
        .chain(core::iter::repeat_n(0.5 / train_b.len() as f64, train_b.len()))
        .collect();

    let (w, bias) = fit_logistic(&xs, &ys, &sw, n);
    let predict = |x: &[f64]| dot(&w, &prep(x)) + bias > 0.0;
    let err_a = test_a.iter().filter(|&&i| predict(a.row(i))).count() as f64 / test_a.len() as f64;
    let err_b = test_b.iter().filter(|&&i| !predict(b.row(i))).count() as f64 / test_b.len() as f64;
    let eps = 0.5 * (err_a + err_b);
    Ok((2.0 * (1.0 - 2.0 * eps)).clamp(0.0, 2.0))
}

fn split(m: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(rng);
    let n_train = (round_half_up(PAD_TRAIN_FRACTION * m as f64) as usize).clamp(1, m - 1);
    let test = idx.split_off(n_train);
    (idx, test)
}

fn standardizer(rows: &[&[f64]], n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = rows.len() as f64;
    let mut mean = vec![0.0; n];
    for r in rows {
        for (s, v) in mean.iter_mut().zip(*r) {
            *s += v;
        }
    }
    mean.iter_mut().for_each(|s| *s /= m);
    let mut var = vec![0.0; n];
    for r in rows {
        for ((s, v), mu) in var.iter_mut().zip(*r).zip(&mean) {
            *s += (v - mu) * (v - mu);
        }
    }
    let scale = var
        .iter()
        .map(|s| {
            let sd = sqrt(s / m);
            if sd < 1e-12 {
                1.0
            } else {
                sd
            }
        })
        .collect();
    (mean, scale)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + exp(-z))
    } else {
        let e = exp(z);
        e / (1.0 + e)
    }
}

/// Weighted L2-regularized logistic regression by gradient descent; step size
/// is the inverse of a trace bound on the loss curvature.
fn fit_logistic(xs: &[Vec<f64>], ys: &[f64], sw: &[f64], n: usize) -> (Vec<f64>, f64) {
    let curvature = 0.25
        * xs.iter()
            .zip(sw)
            .map(|(x, s)| s * (dot(x, x) + 1.0))
            .sum::<f64>()
        + PAD_L2;
    let lr = 1.0 / curvature;
    let mut w = vec![0.0; n];
    let mut bias = 0.0;
    let mut grad = vec![0.0; n];
    for _ in 0..PAD_EPOCHS {
        grad.iter_mut().zip(&w).for_each(|(g, wi)| *g = PAD_L2 * wi);
        let mut gb = 0.0;
        for ((x, &y), &s) in xs.iter().zip(ys).zip(sw) {
            let r = s * (sigmoid(dot(&w, x) + bias) - y);
            for (g, xi) in grad.iter_mut().zip(x) {
                *g += r * xi;
            }
            gb += r;
        }
        w.iter_mut().zip(&grad).for_each(|(wi, g)| *wi -= lr * g);
        bias -= lr * gb;
    }
    (w, bias)
}
