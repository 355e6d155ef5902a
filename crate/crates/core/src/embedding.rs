//! Joint latent-space projections.
//!
//! All datasets of a group are embedded together so their coordinates share
//! one latent space; [`transform_groups`] slices the pooled coordinates back
//! into per-dataset [`Dataset`]s that any metric can consume.
//!
//! Two methods are provided: exact PCA, and a neighbor-graph embedding that
//! builds a fuzzy k-nearest-neighbor graph and lays it out with negative
//! sampling SGD (the UMAP construction).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, DatasetGroup, Label};
use crate::error::{invalid, Error, Result};
use crate::geometric::{correlation_from_standardized, standardized, PointMetric};
use crate::linalg::{dot, leading_axes, principal_axes, squared_euclidean, Matrix};
use crate::math::{exp, log, log2, pow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EmbeddingMethod {
    Pca,
    Graph,
}

/// Parameters of a joint embedding.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EmbeddingConfig {
    pub method: EmbeddingMethod,
    pub out_dims: usize,
    pub n_neighbors: usize,
    pub min_dist: f64,
    pub point_metric: PointMetric,
    /// PCA pre-reduction applied before the neighbor graph is built.
    pub pca_prereduce: Option<usize>,
    pub epochs: usize,
    pub seed: u64,
    /// Down-weight graph edges whose endpoints carry different labels.
    pub supervised: bool,
    /// Multiplier applied to cross-label edges when `supervised`.
    pub label_repulsion: f64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            method: EmbeddingMethod::Graph,
            out_dims: 2,
            n_neighbors: 32,
            min_dist: 0.1,
            point_metric: PointMetric::Euclidean,
            pca_prereduce: Some(100),
            epochs: 200,
            seed: 0,
            supervised: false,
            label_repulsion: 0.1,
        }
    }
}

impl EmbeddingConfig {
    pub fn pca(out_dims: usize) -> Self {
        Self {
            method: EmbeddingMethod::Pca,
            out_dims,
            ..Self::default()
        }
    }

    pub fn graph(out_dims: usize) -> Self {
        Self {
            method: EmbeddingMethod::Graph,
            out_dims,
            ..Self::default()
        }
    }

    pub fn validate(&self, total_points: usize, input_dims: usize) -> Result<()> {
        if self.out_dims == 0 || self.out_dims >= input_dims {
            return Err(invalid!(
                "out_dims must be in 1..{input_dims}, got {}",
                self.out_dims
            ));
        }
        if self.method == EmbeddingMethod::Pca {
            return Ok(());
        }
        if self.n_neighbors < 2 || self.n_neighbors >= total_points {
            return Err(invalid!(
                "n_neighbors must be in 2..{total_points}, got {}",
                self.n_neighbors
            ));
        }
        if !(self.min_dist > 0.0) {
            return Err(invalid!("min_dist must be positive"));
        }
        if self.epochs == 0 {
            return Err(invalid!("epochs must be positive"));
        }
        if self.pca_prereduce == Some(0) {
            return Err(invalid!("pca_prereduce must be positive"));
        }
        if !(0.0..=1.0).contains(&self.label_repulsion) {
            return Err(invalid!("label_repulsion must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Runs the configured method.
    pub fn fit(&self, group: &DatasetGroup) -> Result<JointEmbedding> {
        match self.method {
            EmbeddingMethod::Pca => fit_pca(group, self.out_dims),
            EmbeddingMethod::Graph => fit_graph_embedding(group, self),
        }
    }
}

/// Pooled latent coordinates of every dataset in a group.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEmbedding {
    coordinates: Matrix,
    offsets: Vec<Range<usize>>,
    names: Vec<String>,
    labels: Vec<Option<Vec<Label>>>,
    /// `None` when the coordinates were produced elsewhere.
    pub config: Option<EmbeddingConfig>,
}

impl JointEmbedding {
    /// Wraps externally computed pooled coordinates (rows in group order).
    pub fn from_coordinates(group: &DatasetGroup, coordinates: Matrix) -> Result<Self> {
        Self::assemble(group, coordinates, None)
    }

    fn assemble(group: &DatasetGroup, coordinates: Matrix, config: Option<EmbeddingConfig>) -> Result<Self> {
        if coordinates.rows() != group.total_points() {
            return Err(invalid!(
                "embedding has {} rows, group has {} points",
                coordinates.rows(),
                group.total_points()
            ));
        }
        if coordinates.cols() == 0 {
            return Err(Error::Empty {
                rows: coordinates.rows(),
                cols: 0,
            });
        }
        if let Some(pos) = coordinates.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / coordinates.cols(),
                col: pos % coordinates.cols(),
            });
        }
        Ok(Self {
            coordinates,
            offsets: group.offsets(),
            names: group.datasets().iter().map(|d| String::from(d.name())).collect(),
            labels: group
                .datasets()
                .iter()
                .map(|d| d.labels().map(<[Label]>::to_vec))
                .collect(),
            config,
        })
    }

    pub fn coordinates(&self) -> &Matrix {
        &self.coordinates
    }

    pub fn offsets(&self) -> &[Range<usize>] {
        &self.offsets
    }

    pub fn out_dims(&self) -> usize {
        self.coordinates.cols()
    }
}

/// Slices pooled coordinates back into one dataset per source dataset.
pub fn transform_groups(emb: &JointEmbedding) -> Result<DatasetGroup> {
    let datasets = emb
        .offsets
        .iter()
        .zip(&emb.names)
        .zip(&emb.labels)
        .map(|((range, name), labels)| {
            let idx: Vec<usize> = range.clone().collect();
            Dataset::new(name.clone(), emb.coordinates.select_rows(&idx), labels.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    DatasetGroup::new(datasets)
}

/// A fitted PCA basis: `x ↦ Uᵀ(x − mean)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `N × k` orthonormal columns.
    pub axes: Matrix,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    /// Fits `k` components, failing if the data has lower rank.
    pub fn fit(data: &Matrix, k: usize) -> Result<Self> {
        let mean = data.column_means();
        let axes = principal_axes(&data.centered(&mean), k)?;
        Ok(Self {
            mean,
            axes: axes.axes,
            explained_variance: axes.variances,
        })
    }

    /// Fits at most `k` components, truncating to the numerical rank.
    pub fn fit_upto(data: &Matrix, k: usize) -> Result<Self> {
        let mean = data.column_means();
        let axes = leading_axes(&data.centered(&mean), k)?;
        Ok(Self {
            mean,
            axes: axes.axes,
            explained_variance: axes.variances,
        })
    }

    pub fn components(&self) -> usize {
        self.axes.cols()
    }

    pub fn project(&self, data: &Matrix) -> Matrix {
        data.centered(&self.mean)
            .matmul(&self.axes)
            .expect("feature count matches the fitted mean")
    }

    /// `mean + U Uᵀ (x − mean)` for one point.
    pub fn reconstruct_point(&self, x: &[f64], out: &mut [f64]) {
        let k = self.axes.cols();
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        let mut code = vec![0.0; k];
        for (i, &c) in centered.iter().enumerate() {
            let row = self.axes.row(i);
            for (z, &u) in code.iter_mut().zip(row) {
                *z += c * u;
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.mean[i] + dot(self.axes.row(i), &code);
        }
    }
}

/// Joint PCA: center the pooled data and project onto its top `out_dims`
/// principal axes.
pub fn fit_pca(group: &DatasetGroup, out_dims: usize) -> Result<JointEmbedding> {
    if out_dims == 0 || out_dims > group.dim() {
        return Err(invalid!("out_dims must be in 1..={}, got {out_dims}", group.dim()));
    }
    let pooled = group.pooled();
    let model = PcaModel::fit(&pooled, out_dims)?;
    let coords = model.project(&pooled);
    JointEmbedding::assemble(group, coords, Some(EmbeddingConfig::pca(out_dims)))
}

/// Joint neighbor-graph embedding.
///
/// 1. optional PCA pre-reduction;
/// 2. exact k-nearest neighbors under `point_metric`;
/// 3. per point, `ρ` = nearest-neighbor distance and `σ` from bisection so
///    that `Σ exp(−max(0, d − ρ)/σ) = log₂ k`;
/// 4. directed memberships symmetrized by fuzzy union `w₁ + w₂ − w₁w₂`;
/// 5. optionally, cross-label edges scaled by `label_repulsion`;
/// 6. layout initialized from PCA scaled into `[−10, 10]`;
/// 7. SGD with edge-proportional attraction and 5 negative samples per edge
///    sample, learning rate decaying linearly to zero.
pub fn fit_graph_embedding(group: &DatasetGroup, config: &EmbeddingConfig) -> Result<JointEmbedding> {
    let total = group.total_points();
    config.validate(total, group.dim())?;
    let labels = if config.supervised {
        Some(group.pooled_labels().ok_or_else(|| {
            let d = group
                .datasets()
                .iter()
                .find(|d| d.labels().is_none())
                .expect("some dataset is unlabeled");
            Error::MissingLabels {
                what: "supervised embedding",
                dataset: String::from(d.name()),
            }
        })?)
    } else {
        None
    };

    let pooled = group.pooled();
    let features = match config.pca_prereduce {
        Some(p) if p < pooled.cols() => {
            let model = PcaModel::fit_upto(&pooled, p)?;
            if model.components() == 0 {
                pooled
            } else {
                model.project(&pooled)
            }
        }
        _ => pooled,
    };

    let knn = exact_knn(&features, config.n_neighbors, config.point_metric);
    let mut edges = fuzzy_graph(&knn);
    if let Some(labels) = &labels {
        for e in &mut edges {
            if labels[e.head] != labels[e.tail] {
                e.weight *= config.label_repulsion;
            }
        }
    }
    let components = count_components(total, &edges);
    if components > 1 {
        log::warn!(
            "neighbor graph has {components} connected components; they keep their PCA placement"
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut layout = initial_layout(&features, config.out_dims, &mut rng)?;
    let (a, b) = fit_curve(config.min_dist, 1.0);
    optimize_layout(&mut layout, &edges, a, b, config.epochs, &mut rng);
    JointEmbedding::assemble(group, layout, Some(config.clone()))
}

struct Knn {
    k: usize,
    /// `n × k` neighbor indices, nearest first.
    indices: Vec<usize>,
    distances: Vec<f64>,
}

fn exact_knn(data: &Matrix, k: usize, metric: PointMetric) -> Knn {
    let n = data.rows();
    let normalized: Option<Vec<Vec<f64>>> = match metric {
        PointMetric::Correlation => Some(data.iter_rows().map(standardized).collect()),
        PointMetric::Euclidean => None,
    };
    let mut indices = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        scratch.clear();
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = match &normalized {
                Some(z) => correlation_from_standardized(&z[i], &z[j]),
                None => squared_euclidean(data.row(i), data.row(j)),
            };
            scratch.push((d, j));
        }
        let cmp = |x: &(f64, usize), y: &(f64, usize)| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1));
        scratch.select_nth_unstable_by(k - 1, cmp);
        let nearest = &mut scratch[..k];
        nearest.sort_by(cmp);
        for &(d, j) in nearest.iter() {
            indices.push(j);
            distances.push(match metric {
                PointMetric::Euclidean => libm::sqrt(d),
                PointMetric::Correlation => d,
            });
        }
    }
    Knn {
        k,
        indices,
        distances,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    head: usize,
    tail: usize,
    weight: f64,
}

const SIGMA_TOL: f64 = 1e-5;
const SIGMA_MAX_ITERS: usize = 64;
const MIN_SIGMA_SCALE: f64 = 1e-3;

/// `(ρ, σ)` for one point's neighbor distances.
fn smooth_distances(dists: &[f64], mean_all: f64) -> (f64, f64) {
    let target = log2(dists.len() as f64);
    let rho = dists[0];
    let (mut lo, mut hi, mut mid) = (0.0f64, f64::INFINITY, 1.0f64);
    for _ in 0..SIGMA_MAX_ITERS {
        let psum: f64 = dists.iter().map(|&d| exp(-(d - rho).max(0.0) / mid)).sum();
        if (psum - target).abs() < SIGMA_TOL {
            break;
        }
        if psum > target {
            hi = mid;
            mid = 0.5 * (lo + hi);
        } else {
            lo = mid;
            mid = if hi.is_infinite() { mid * 2.0 } else { 0.5 * (lo + hi) };
        }
    }
    // keep σ away from zero when every neighbor sits at ρ
    let local_mean = dists.iter().sum::<f64>() / dists.len() as f64;
    let floor = if rho > 0.0 {
        MIN_SIGMA_SCALE * local_mean
    } else {
        MIN_SIGMA_SCALE * mean_all
    };
    (rho, mid.max(floor).max(f64::MIN_POSITIVE))
}

/// Symmetric fuzzy membership graph, both directions of every edge, sorted by
/// `(head, tail)`.
fn fuzzy_graph(knn: &Knn) -> Vec<Edge> {
    let n = knn.indices.len() / knn.k;
    let mean_all = knn.distances.iter().sum::<f64>() / knn.distances.len() as f64;
    let mut directed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..n {
        let d = &knn.distances[i * knn.k..(i + 1) * knn.k];
        let (rho, sigma) = smooth_distances(d, mean_all);
        for (t, &j) in knn.indices[i * knn.k..(i + 1) * knn.k].iter().enumerate() {
            let w = exp(-(d[t] - rho).max(0.0) / sigma);
            directed.insert((i, j), w);
        }
    }
    let mut edges = Vec::with_capacity(directed.len() * 2);
    let mut seen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(i, j), &w) in &directed {
        let key = (i.min(j), i.max(j));
        if seen.contains_key(&key) {
            continue;
        }
        let back = directed.get(&(j, i)).copied().unwrap_or(0.0);
        let sym = w + back - w * back;
        seen.insert(key, sym);
    }
    for (&(i, j), &w) in &seen {
        if w > 0.0 {
            edges.push(Edge { head: i, tail: j, weight: w });
            edges.push(Edge { head: j, tail: i, weight: w });
        }
    }
    edges.sort_by(|x, y| x.head.cmp(&y.head).then(x.tail.cmp(&y.tail)));
    edges
}

fn count_components(n: usize, edges: &[Edge]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in edges {
        let (a, b) = (find(&mut parent, e.head), find(&mut parent, e.tail));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

fn initial_layout(features: &Matrix, out_dims: usize, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let n = features.rows();
    let model = PcaModel::fit_upto(features, out_dims)?;
    let projected = model.project(features);
    let mut layout = Matrix::zeros(n, out_dims);
    for i in 0..n {
        for j in 0..projected.cols() {
            layout.set(i, j, projected.get(i, j));
        }
    }
    let max_abs = layout.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if max_abs > 0.0 { 10.0 / max_abs } else { 1.0 };
    for v in layout.as_mut_slice() {
        // jitter breaks exact ties (and rank-deficient init dimensions)
        *v = *v * scale + (rng.random::<f64>() - 0.5) * 1e-4;
    }
    Ok(layout)
}

/// Least-squares fit of `1/(1 + a·d^{2b})` to the membership target
/// `1` for `d < min_dist`, `exp(−(d − min_dist)/spread)` beyond.
pub fn fit_curve(min_dist: f64, spread: f64) -> (f64, f64) {
    let xs: Vec<f64> = (0..300).map(|i| 3.0 * spread * i as f64 / 299.0).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| if x < min_dist { 1.0 } else { exp(-(x - min_dist) / spread) })
        .collect();
    let residual = |a: f64, b: f64| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let r = 1.0 / (1.0 + a * pow(x, 2.0 * b)) - y;
                r * r
            })
            .sum()
    };
    // Levenberg-Marquardt on (a, b)
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let mut lambda = 1e-3;
    let mut cost = residual(a, b);
    for _ in 0..500 {
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x == 0.0 {
                continue;
            }
            let p = pow(x, 2.0 * b);
            let denom = 1.0 + a * p;
            let f = 1.0 / denom;
            let r = f - y;
            let da = -p / (denom * denom);
            let db = -a * p * 2.0 * log(x) / (denom * denom);
            let g = [da, db];
            for u in 0..2 {
                jtr[u] += g[u] * r;
                for v in 0..2 {
                    jtj[u][v] += g[u] * g[v];
                }
            }
        }
        let m00 = jtj[0][0] * (1.0 + lambda);
        let m11 = jtj[1][1] * (1.0 + lambda);
        let det = m00 * m11 - jtj[0][1] * jtj[1][0];
        if det == 0.0 {
            break;
        }
        let step_a = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let step_b = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let (na, nb) = (a + step_a, b + step_b);
        let new_cost = if na > 0.0 && nb > 0.0 { residual(na, nb) } else { f64::INFINITY };
        if new_cost < cost {
            let done = (cost - new_cost) < 1e-15 * cost.max(1e-300);
            a = na;
            b = nb;
            cost = new_cost;
            lambda *= 0.3;
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    (a, b)
}

const NEGATIVE_SAMPLES: f64 = 5.0;
const GRAD_CLIP: f64 = 4.0;

fn clip(v: f64) -> f64 {
    v.clamp(-GRAD_CLIP, GRAD_CLIP)
}

fn optimize_layout(layout: &mut Matrix, edges: &[Edge], a: f64, b: f64, epochs: usize, rng: &mut ChaCha8Rng) {
    let n = layout.rows();
    let dims = layout.cols();
    let max_w = edges.iter().fold(0.0f64, |m, e| m.max(e.weight));
    if max_w <= 0.0 {
        return;
    }
    let n_epochs = epochs as f64;
    // edges too weak to be sampled even once are dropped
    let active: Vec<&Edge> = edges.iter().filter(|e| e.weight >= max_w / n_epochs).collect();
    let per_sample: Vec<f64> = active.iter().map(|e| max_w / e.weight).collect();
    let per_negative: Vec<f64> = per_sample.iter().map(|p| p / NEGATIVE_SAMPLES).collect();
    let mut next_sample = per_sample.clone();
    let mut next_negative = per_negative.clone();
    let mut yi = vec![0.0; dims];
    let mut yj = vec![0.0; dims];

    for epoch in 0..epochs {
        let alpha = 1.0 - epoch as f64 / n_epochs;
        let now = epoch as f64;
        for (e, edge) in active.iter().enumerate() {
            if next_sample[e] > now {
                continue;
            }
            let (i, j) = (edge.head, edge.tail);
            yi.copy_from_slice(layout.row(i));
            yj.copy_from_slice(layout.row(j));
            let d2 = squared_euclidean(&yi, &yj);
            let coeff = if d2 > 0.0 {
                -2.0 * a * b * pow(d2, b - 1.0) / (a * pow(d2, b) + 1.0)
            } else {
                0.0
            };
            for d in 0..dims {
                let g = clip(coeff * (yi[d] - yj[d]));
                yi[d] += g * alpha;
                yj[d] -= g * alpha;
            }
            layout.row_mut(j).copy_from_slice(&yj);
            next_sample[e] += per_sample[e];

            let n_neg = ((now - next_negative[e]) / per_negative[e]).max(0.0) as usize;
            for _ in 0..n_neg {
                let k = rng.random_range(0..n);
                if k == i {
                    continue;
                }
                let yk = layout.row(k);
                let d2 = squared_euclidean(&yi, yk);
                let coeff = if d2 > 0.0 {
                    2.0 * b / ((0.001 + d2) * (a * pow(d2, b) + 1.0))
                } else if k == j {
                    continue;
                } else {
                    0.0
                };
                for d in 0..dims {
                    let g = if coeff > 0.0 { clip(coeff * (yi[d] - yk[d])) } else { GRAD_CLIP };
                    yi[d] += g * alpha;
                }
            }
            next_negative[e] += n_neg as f64 * per_negative[e];
            layout.row_mut(i).copy_from_slice(&yi);
        }
    }
}
