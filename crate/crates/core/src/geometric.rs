//! Euclidean-family and cosine dataset distances. They work the same in raw
//! feature space and in an embedded space.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, euclidean, norm, squared_euclidean, Matrix};

/// Default cluster count for [`cluster_euclidean`].
pub const DEFAULT_CLUSTERS: usize = 3;

const KMEANS_MAX_ITERS: usize = 300;
const KMEANS_SHIFT_TOL: f64 = 1e-6;

/// Distance between two individual datapoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PointMetric {
    #[default]
    Euclidean,
    /// `1 − Pearson correlation` of the two feature vectors; a constant vector
    /// is treated as uncorrelated with everything (distance 1).
    Correlation,
}

impl PointMetric {
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            PointMetric::Euclidean => euclidean(x, y),
            PointMetric::Correlation => {
                let (zx, zy) = (standardized(x), standardized(y));
                correlation_from_standardized(&zx, &zy)
            }
        }
    }
}

/// Centers `x` and scales it to unit norm (all zeros for a constant vector).
pub(crate) fn standardized(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut z: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let n = norm(&z);
    if n > 0.0 {
        z.iter_mut().for_each(|v| *v /= n);
    }
    z
}

#[inline]
pub(crate) fn correlation_from_standardized(zx: &[f64], zy: &[f64]) -> f64 {
    (1.0 - dot(zx, zy)).clamp(0.0, 2.0)
}

/// Mean point-to-point distance over all cross pairs.
pub fn pairwise_euclidean(a: &Dataset, b: &Dataset) -> Result<f64> {
    a.check_comparable(b)?;
    Ok(mean_pairwise(a.data(), b.data()))
}

/// Orders a pair canonically so cross sums are bit-identical under swap.
pub(crate) fn canonical<'m>(a: &'m Matrix, b: &'m Matrix) -> (&'m Matrix, &'m Matrix) {
    let key = |m: &Matrix| (m.rows(), m.cols());
    let ord = key(a).cmp(&key(b)).then_with(|| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    if ord.is_gt() {
        (b, a)
    } else {
        (a, b)
    }
}

fn mean_pairwise(a: &Matrix, b: &Matrix) -> f64 {
    let (a, b) = canonical(a, b);
    let mut s = 0.0;
    for x in a.iter_rows() {
        for y in b.iter_rows() {
            s += euclidean(x, y);
        }
    }
    s / (a.rows() as f64 * b.rows() as f64)
}

/// Distance between the two dataset means.
pub fn centroid_euclidean(a: &Dataset, b: &Dataset) -> Result<f64> {
    a.check_comparable(b)?;
    Ok(euclidean(&a.mean(), &b.mean()))
}

/// Mean distance between the k-means centroids of `a` and of `b`.
///
/// Each dataset is clustered independently with the same `seed`, so the value
/// does not depend on argument order beyond summation rounding.
pub fn cluster_euclidean(a: &Dataset, b: &Dataset, k: usize, seed: u64) -> Result<f64> {
    a.check_comparable(b)?;
    let ca = kmeans(a.data(), k, seed)?;
    let cb = kmeans(b.data(), k, seed)?;
    Ok(mean_pairwise(&ca.centroids, &cb.centroids))
}

/// Average cosine distance over all cross pairs; a zero-norm point
/// contributes 1.
pub fn cosine_distance(a: &Dataset, b: &Dataset) -> Result<f64> {
    a.check_comparable(b)?;
    let (a, b) = canonical(a.data(), b.data());
    let nb: Vec<f64> = b.iter_rows().map(norm).collect();
    let mut s = 0.0;
    for x in a.iter_rows() {
        let nx = norm(x);
        for (y, &ny) in b.iter_rows().zip(&nb) {
            s += if nx == 0.0 || ny == 0.0 {
                1.0
            } else {
                (1.0 - dot(x, y) / (nx * ny)).clamp(0.0, 2.0)
            };
        }
    }
    Ok(s / (a.rows() as f64 * b.rows() as f64))
}

/// Outcome of [`kmeans`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// `k × N`.
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each Lloyd iteration.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

/// k-means with k-means++ seeding followed by Lloyd iterations until no
/// centroid moves more than 1e-6 (at most 300 iterations).
///
/// A cluster that loses all its points is re-seeded at the point farthest from
/// its nearest centroid.
pub fn kmeans(data: &Matrix, k: usize, seed: u64) -> Result<KMeansResult> {
    let m = data.rows();
    if k == 0 {
        return Err(crate::error::invalid!("k must be positive"));
    }
    if m < k {
        return Err(Error::TooFewPoints { k, points: m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(data, k, &mut rng);
    let mut assignments = vec![0usize; m];
    let mut history = Vec::new();
    let mut iterations = 0;

    loop {
        iterations += 1;
        assign(data, &centroids, &mut assignments);
        let mut next = update(data, &assignments, k);
        let empty: Vec<usize> = (0..k).filter(|c| next.counts[*c] == 0).collect();
        if !empty.is_empty() {
            for c in empty {
                let far = farthest_point(data, &next.centroids, &next.counts);
                next.centroids.row_mut(c).copy_from_slice(data.row(far));
                let old = assignments[far];
                assignments[far] = c;
                next.counts[c] = 1;
                next.counts[old] -= 1;
            }
            next = update(data, &assignments, k);
        }
        let shift = (0..k)
            .map(|c| euclidean(centroids.row(c), next.centroids.row(c)))
            .fold(0.0, f64::max);
        centroids = next.centroids;
        history.push(inertia(data, &centroids, &assignments));
        if shift < KMEANS_SHIFT_TOL || iterations >= KMEANS_MAX_ITERS {
            break;
        }
    }
    Ok(KMeansResult {
        centroids,
        inertia: *history.last().expect("at least one iteration"),
        assignments,
        inertia_history: history,
        iterations,
    })
}

fn plus_plus_init(data: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let m = data.rows();
    let mut centroids = Matrix::zeros(k, data.cols());
    let mut chosen = vec![false; m];
    let first = rng.random_range(0..m);
    chosen[first] = true;
    centroids.row_mut(0).copy_from_slice(data.row(first));
    let mut d2: Vec<f64> = data.iter_rows().map(|x| squared_euclidean(x, data.row(first))).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc >= target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave target just above the final sum
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            // every point coincides with a centroid
            chosen.iter().position(|&c| !c).expect("m >= k")
        };
        chosen[pick] = true;
        centroids.row_mut(c).copy_from_slice(data.row(pick));
        for (i, x) in data.iter_rows().enumerate() {
            d2[i] = d2[i].min(squared_euclidean(x, data.row(pick)));
        }
    }
    centroids
}

fn nearest(x: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centroids.iter_rows().enumerate() {
        let d = squared_euclidean(x, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(data: &Matrix, centroids: &Matrix, out: &mut [usize]) {
    for (i, x) in data.iter_rows().enumerate() {
        out[i] = nearest(x, centroids).0;
    }
}

struct Update {
    centroids: Matrix,
    counts: Vec<usize>,
}

fn update(data: &Matrix, assignments: &[usize], k: usize) -> Update {
    let mut centroids = Matrix::zeros(k, data.cols());
    let mut counts = vec![0usize; k];
    for (x, &c) in data.iter_rows().zip(assignments) {
        counts[c] += 1;
        for (s, &v) in centroids.row_mut(c).iter_mut().zip(x) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let n = counts[c] as f64;
            centroids.row_mut(c).iter_mut().for_each(|s| *s /= n);
        }
    }
    Update { centroids, counts }
}

fn farthest_point(data: &Matrix, centroids: &Matrix, counts: &[usize]) -> usize {
    let live: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] > 0).collect();
    let mut best = (0, -1.0);
    for (i, x) in data.iter_rows().enumerate() {
        let d = live
            .iter()
            .map(|&c| squared_euclidean(x, centroids.row(c)))
            .fold(f64::INFINITY, f64::min);
        if d > best.1 {
            best = (i, d);
        }
    }
    best.0
}

fn inertia(data: &Matrix, centroids: &Matrix, assignments: &[usize]) -> f64 {
    data.iter_rows()
        .zip(assignments)
        .map(|(x, &c)| squared_euclidean(x, centroids.row(c)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows("t", rows).unwrap()
    }

    #[test]
    fn pairwise_examples() {
        assert_eq!(pairwise_euclidean(&ds(&[&[0.0, 0.0]]), &ds(&[&[3.0, 4.0]])).unwrap(), 5.0);
        let p = ds(&[&[1.5, -2.0]]);
        assert_eq!(pairwise_euclidean(&p, &p).unwrap(), 0.0);
        let a = ds(&[&[0.0, 0.0], &[0.0, 2.0]]);
        let b = ds(&[&[0.0, 1.0]]);
        assert_eq!(pairwise_euclidean(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn centroid_examples() {
        let a = ds(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let b = ds(&[&[1.0, 0.0]]);
        assert_eq!(centroid_euclidean(&a, &b).unwrap(), 0.0);
        assert_eq!(centroid_euclidean(&ds(&[&[0.0, 0.0]]), &ds(&[&[3.0, 4.0]])).unwrap(), 5.0);
    }

    #[test]
    fn correlation_point_metric() {
        let m = PointMetric::Correlation;
        assert!(m.distance(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]) < 1e-2);
        assert!((m.distance(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) - 2.0).abs() < 1e-12);
        assert_eq!(m.distance(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]), 1.0);
        assert_eq!(PointMetric::Euclidean.distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
    }

    #[test]
    fn cosine_examples() {
        let x = ds(&[&[1.0, 0.0]]);
        assert_eq!(cosine_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(cosine_distance(&x, &ds(&[&[0.0, 1.0]])).unwrap(), 1.0);
        assert_eq!(cosine_distance(&x, &ds(&[&[-1.0, 0.0]])).unwrap(), 2.0);
        assert_eq!(cosine_distance(&x, &ds(&[&[0.0, 0.0]])).unwrap(), 1.0);
    }

    #[test]
    fn cluster_with_one_cluster_is_centroid_distance() {
        let a = ds(&[&[0.0, 1.0], &[2.0, 5.0], &[-1.0, 0.5]]);
        let b = ds(&[&[4.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(
            cluster_euclidean(&a, &b, 1, 9).unwrap(),
            centroid_euclidean(&a, &b).unwrap()
        );
    }

    #[test]
    fn cluster_with_k_equal_m_is_pairwise() {
        let a = ds(&[&[0.0, 1.0], &[2.0, 5.0], &[-1.0, 0.5], &[3.0, 3.0]]);
        let c = cluster_euclidean(&a, &a, 4, 1).unwrap();
        let p = pairwise_euclidean(&a, &a).unwrap();
        assert!((c - p).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let a = ds(&[&[0.0], &[1.0]]);
        assert_eq!(
            cluster_euclidean(&a, &a, 3, 0).unwrap_err(),
            Error::TooFewPoints { k: 3, points: 2 }
        );
    }

    #[test]
    fn kmeans_invariants() {
        let mut rows = Vec::new();
        let mut s = 17u64;
        for i in 0..90 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            let jitter = (s >> 40) as f64 / (1u64 << 24) as f64;
            let center = [(i % 3) as f64 * 10.0, (i % 3) as f64 * -4.0];
            rows.push([center[0] + jitter, center[1] - jitter]);
        }
        let m = Matrix::from_rows(&rows).unwrap();
        let r = kmeans(&m, 3, 5).unwrap();
        assert!(r.assignments.iter().all(|&c| c < 3));
        for c in 0..3 {
            let members: Vec<&[f64]> = m
                .iter_rows()
                .zip(&r.assignments)
                .filter(|(_, &a)| a == c)
                .map(|(x, _)| x)
                .collect();
            assert!(!members.is_empty());
            for j in 0..2 {
                let mean = members.iter().map(|x| x[j]).sum::<f64>() / members.len() as f64;
                assert!((mean - r.centroids.get(c, j)).abs() < 1e-9);
            }
        }
        for w in r.inertia_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
        assert_eq!(kmeans(&m, 3, 5).unwrap(), r);
    }

    #[test]
    fn kmeans_with_duplicate_points() {
        let m = Matrix::from_rows(&[[1.0], [1.0], [1.0], [2.0]]).unwrap();
        let r = kmeans(&m, 3, 0).unwrap();
        assert!(r.inertia.abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_translation_invariant() {
        let a = ds(&[&[0.0, 1.0], &[2.0, 5.0], &[-1.0, 0.5], &[0.3, 0.3]]);
        let b = ds(&[&[4.0, 1.0], &[2.0, 2.0], &[1.0, -1.0]]);
        let shift = |d: &Dataset| {
            let rows: Vec<[f64; 2]> = d.rows().map(|r| [r[0] + 7.5, r[1] - 3.0]).collect();
            Dataset::from_rows("s", &rows).unwrap()
        };
        let (sa, sb) = (shift(&a), shift(&b));
        for f in [pairwise_euclidean, centroid_euclidean] {
            assert_eq!(f(&a, &b).unwrap(), f(&b, &a).unwrap());
            assert!((f(&a, &b).unwrap() - f(&sa, &sb).unwrap()).abs() < 1e-9);
        }
        let c = |x: &Dataset, y: &Dataset| cluster_euclidean(x, y, 2, 3).unwrap();
        assert!((c(&a, &b) - c(&b, &a)).abs() < 1e-9);
        assert!((c(&a, &b) - c(&sa, &sb)).abs() < 1e-9);
        assert_eq!(cosine_distance(&a, &b).unwrap(), cosine_distance(&b, &a).unwrap());
    }
}
