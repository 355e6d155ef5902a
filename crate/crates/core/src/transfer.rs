//! Proxy transfer tasks, distance / performance matrices and their
//! correlation.
//!
//! A model fitted on dataset `i` is evaluated on dataset `j`, giving a score
//! matrix `s`. The drop `ΔP_ij` is oriented so that larger always means worse
//! transfer. A [`DistanceMatrix`] built from any [`Metric`] in any [`Space`] is
//! then correlated with `ΔP`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, DatasetGroup, Label};
use crate::embedding::{transform_groups, EmbeddingConfig, EmbeddingMethod, PcaModel};
use crate::error::{invalid, Error, Result};
use crate::geometric::{self, PointMetric};
use crate::histogram::joint_histograms;
use crate::linalg::{squared_euclidean, Matrix};
use crate::math::{log10, sqrt};
use crate::statistical::{self, MmdKernel};
use crate::subspace::{self, DEFAULT_SUBSPACE_DIM};
use crate::supervised::{self, LabelAwareBase, LabelPenaltyTable};

/// Reconstruction NMSE is floored here so that exact reconstructions stay finite.
pub const NMSE_FLOOR_DB: f64 = -300.0;

/// Default rank of the reconstruction task.
pub const DEFAULT_RANK: usize = 32;

/// Inter-dataset distance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Metric {
    /// Histogram KL divergence `KL(a ‖ b)`. The only asymmetric metric.
    KlDivergence {
        #[cfg_attr(feature = "serde", serde(default))]
        bins: Option<usize>,
    },
    JensenShannon {
        #[cfg_attr(feature = "serde", serde(default))]
        bins: Option<usize>,
    },
    Hellinger {
        #[cfg_attr(feature = "serde", serde(default))]
        bins: Option<usize>,
    },
    TotalVariation {
        #[cfg_attr(feature = "serde", serde(default))]
        bins: Option<usize>,
    },
    /// Per-feature 1-Wasserstein, averaged with optional feature weights.
    Wasserstein {
        #[cfg_attr(feature = "serde", serde(default))]
        weights: Option<Vec<f64>>,
    },
    KolmogorovSmirnov,
    Energy,
    Mmd {
        #[cfg_attr(feature = "serde", serde(default = "default_kernel"))]
        kernel: MmdKernel,
    },
    PairwiseEuclidean,
    CentroidEuclidean,
    ClusterEuclidean {
        #[cfg_attr(feature = "serde", serde(default = "default_clusters"))]
        k: usize,
        /// Falls back to the run seed.
        #[cfg_attr(feature = "serde", serde(default))]
        seed: Option<u64>,
    },
    Cosine,
    Grassmann {
        #[cfg_attr(feature = "serde", serde(default))]
        k: Option<usize>,
    },
    Chordal {
        #[cfg_attr(feature = "serde", serde(default))]
        k: Option<usize>,
    },
    Asimov {
        #[cfg_attr(feature = "serde", serde(default))]
        k: Option<usize>,
    },
    ProxyA {
        #[cfg_attr(feature = "serde", serde(default))]
        seed: Option<u64>,
    },
    LabelAware {
        #[cfg_attr(feature = "serde", serde(default = "default_base"))]
        base: LabelAwareBase,
        #[cfg_attr(feature = "serde", serde(default))]
        point_metric: PointMetric,
    },
    /// Zero for every pair; a null baseline that correlates with nothing.
    Constant,
}

#[cfg(feature = "serde")]
fn default_kernel() -> MmdKernel {
    MmdKernel::Rbf
}

#[cfg(feature = "serde")]
fn default_clusters() -> usize {
    geometric::DEFAULT_CLUSTERS
}

#[cfg(feature = "serde")]
fn default_base() -> LabelAwareBase {
    LabelAwareBase::CentroidEuclidean
}

impl Metric {
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Metric::KlDivergence { .. })
    }

    pub fn needs_labels(&self) -> bool {
        matches!(self, Metric::LabelAware { .. })
    }

    /// Short identifier, e.g. `cluster_euclidean(k=3)`.
    pub fn name(&self) -> String {
        let base_name = |b: &LabelAwareBase| match b {
            LabelAwareBase::CentroidEuclidean => String::from("centroid_euclidean"),
            LabelAwareBase::PairwiseEuclidean => String::from("pairwise_euclidean"),
            LabelAwareBase::ClusterEuclidean { k, .. } => format!("cluster_euclidean(k={k})"),
            LabelAwareBase::Cosine => String::from("cosine"),
            LabelAwareBase::Wasserstein => String::from("wasserstein"),
        };
        match self {
            Metric::KlDivergence { .. } => "kl".into(),
            Metric::JensenShannon { .. } => "jensen_shannon".into(),
            Metric::Hellinger { .. } => "hellinger".into(),
            Metric::TotalVariation { .. } => "total_variation".into(),
            Metric::Wasserstein { weights: None } => "wasserstein".into(),
            Metric::Wasserstein { weights: Some(_) } => "wasserstein(weighted)".into(),
            Metric::KolmogorovSmirnov => "kolmogorov_smirnov".into(),
            Metric::Energy => "energy".into(),
            Metric::Mmd { kernel: MmdKernel::Linear } => "mmd_linear".into(),
            Metric::Mmd { kernel: MmdKernel::Rbf } => "mmd_rbf".into(),
            Metric::PairwiseEuclidean => "pairwise_euclidean".into(),
            Metric::CentroidEuclidean => "centroid_euclidean".into(),
            Metric::ClusterEuclidean { k, .. } => format!("cluster_euclidean(k={k})"),
            Metric::Cosine => "cosine".into(),
            Metric::Grassmann { .. } => "grassmann".into(),
            Metric::Chordal { .. } => "chordal".into(),
            Metric::Asimov { .. } => "asimov".into(),
            Metric::ProxyA { .. } => "proxy_a".into(),
            Metric::LabelAware { base, point_metric } => match point_metric {
                PointMetric::Euclidean => format!("label_aware({})", base_name(base)),
                PointMetric::Correlation => format!("label_aware({},correlation)", base_name(base)),
            },
            Metric::Constant => "constant".into(),
        }
    }

    /// The full roster with default parameters.
    pub fn roster() -> Vec<Metric> {
        vec![
            Metric::KlDivergence { bins: None },
            Metric::JensenShannon { bins: None },
            Metric::Hellinger { bins: None },
            Metric::TotalVariation { bins: None },
            Metric::Wasserstein { weights: None },
            Metric::KolmogorovSmirnov,
            Metric::Energy,
            Metric::Mmd { kernel: MmdKernel::Linear },
            Metric::Mmd { kernel: MmdKernel::Rbf },
            Metric::PairwiseEuclidean,
            Metric::CentroidEuclidean,
            Metric::ClusterEuclidean {
                k: geometric::DEFAULT_CLUSTERS,
                seed: None,
            },
            Metric::Cosine,
            Metric::Grassmann { k: None },
            Metric::Chordal { k: None },
            Metric::Asimov { k: None },
            Metric::ProxyA { seed: None },
            Metric::LabelAware {
                base: LabelAwareBase::CentroidEuclidean,
                point_metric: PointMetric::Euclidean,
            },
            Metric::Constant,
        ]
    }
}

/// Where a metric is evaluated.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Space {
    #[default]
    Raw,
    /// Joint embedding fitted on the whole group.
    Embedded(EmbeddingConfig),
    /// The group already holds embedded coordinates supplied from outside.
    Imported,
}

impl Space {
    pub fn name(&self) -> String {
        match self {
            Space::Raw => "raw".into(),
            Space::Embedded(c) => match c.method {
                EmbeddingMethod::Pca => format!("pca{}", c.out_dims),
                EmbeddingMethod::Graph if c.supervised => format!("graph{}(supervised)", c.out_dims),
                EmbeddingMethod::Graph => format!("graph{}", c.out_dims),
            },
            Space::Imported => "imported".into(),
        }
    }

    /// Maps the group into this space.
    pub fn apply(&self, group: &DatasetGroup) -> Result<DatasetGroup> {
        match self {
            Space::Raw | Space::Imported => Ok(group.clone()),
            Space::Embedded(config) => transform_groups(&config.fit(group)?),
        }
    }
}

/// A metric evaluated in a space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Pipeline {
    #[cfg_attr(feature = "serde", serde(default))]
    pub space: Space,
    pub metric: Metric,
}

impl Pipeline {
    pub fn new(space: Space, metric: Metric) -> Self {
        Self { space, metric }
    }

    pub fn raw(metric: Metric) -> Self {
        Self::new(Space::Raw, metric)
    }

    /// `metric@space`.
    pub fn descriptor(&self) -> String {
        format!("{}@{}", self.metric.name(), self.space.name())
    }
}

/// A metric bound to a group, with group-wide state (the label penalty
/// table) computed once.
///
/// Pairs can be evaluated in any order or in parallel; [`MetricPlan::assemble`]
/// places them deterministically.
#[derive(Debug, Clone)]
pub struct MetricPlan<'a> {
    group: &'a DatasetGroup,
    metric: &'a Metric,
    seed: u64,
    table: Option<LabelPenaltyTable>,
}

impl<'a> MetricPlan<'a> {
    pub fn new(group: &'a DatasetGroup, metric: &'a Metric, seed: u64) -> Result<Self> {
        let table = match metric {
            Metric::LabelAware { point_metric, .. } => {
                Some(supervised::penalty_table(group, *point_metric)?)
            }
            _ => None,
        };
        Ok(Self {
            group,
            metric,
            seed,
            table,
        })
    }

    /// Pairs to evaluate: `i ≤ j` for symmetric metrics, all ordered pairs
    /// otherwise.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let k = self.group.len();
        let symmetric = self.metric.is_symmetric();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if !symmetric || i <= j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Distance from dataset `i` to dataset `j`; errors name the pair.
    pub fn evaluate(&self, i: usize, j: usize) -> Result<f64> {
        let (a, b) = (self.group.get(i), self.group.get(j));
        self.distance(a, b).map_err(|e| Error::Pair {
            metric: self.metric.name(),
            left: a.name().into(),
            right: b.name().into(),
            cause: Box::new(e),
        })
    }

    fn distance(&self, a: &Dataset, b: &Dataset) -> Result<f64> {
        let subspace_k = |k: &Option<usize>| k.unwrap_or(DEFAULT_SUBSPACE_DIM.min(a.dim()));
        match self.metric {
            Metric::KlDivergence { bins } => Ok(statistical::kl_divergence(&joint_histograms(a, b, *bins)?)),
            Metric::JensenShannon { bins } => {
                Ok(statistical::jensen_shannon(&joint_histograms(a, b, *bins)?))
            }
            Metric::Hellinger { bins } => Ok(statistical::hellinger(&joint_histograms(a, b, *bins)?)),
            Metric::TotalVariation { bins } => {
                Ok(statistical::total_variation(&joint_histograms(a, b, *bins)?))
            }
            Metric::Wasserstein { weights } => {
                Ok(statistical::wasserstein1(a, b, weights.as_deref())?.mean)
            }
            Metric::KolmogorovSmirnov => Ok(statistical::kolmogorov_smirnov(a, b)?.mean),
            Metric::Energy => statistical::energy_distance(a, b),
            Metric::Mmd { kernel } => statistical::mmd(a, b, *kernel),
            Metric::PairwiseEuclidean => geometric::pairwise_euclidean(a, b),
            Metric::CentroidEuclidean => geometric::centroid_euclidean(a, b),
            Metric::ClusterEuclidean { k, seed } => {
                geometric::cluster_euclidean(a, b, *k, seed.unwrap_or(self.seed))
            }
            Metric::Cosine => geometric::cosine_distance(a, b),
            Metric::Grassmann { k } => Ok(subspace::grassmann(&subspace::principal_angles(a, b, subspace_k(k))?)),
            Metric::Chordal { k } => Ok(subspace::chordal(&subspace::principal_angles(a, b, subspace_k(k))?)),
            Metric::Asimov { k } => Ok(subspace::asimov(&subspace::principal_angles(a, b, subspace_k(k))?)),
            Metric::ProxyA { seed } => supervised::proxy_a_distance(a, b, seed.unwrap_or(self.seed)),
            Metric::LabelAware { base, .. } => {
                let table = self.table.as_ref().expect("penalty table prepared for label-aware metrics");
                supervised::label_aware_distance(a, b, table, *base)
            }
            Metric::Constant => {
                a.check_comparable(b)?;
                Ok(0.0)
            }
        }
    }

    /// Builds the `K×K` matrix from values listed in [`MetricPlan::pairs`] order.
    pub fn assemble(&self, values: &[f64]) -> DistanceMatrix {
        let k = self.group.len();
        let pairs = self.pairs();
        assert_eq!(values.len(), pairs.len(), "one value per planned pair");
        let mut m = Matrix::zeros(k, k);
        let symmetric = self.metric.is_symmetric();
        for (&(i, j), &v) in pairs.iter().zip(values) {
            m.set(i, j, v);
            if symmetric {
                m.set(j, i, v);
            }
        }
        DistanceMatrix {
            values: m,
            names: self.group.datasets().iter().map(|d| String::from(d.name())).collect(),
            metric: self.metric.clone(),
            symmetric,
        }
    }
}

/// `K×K` matrix of `d(D_i, D_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub values: Matrix,
    pub names: Vec<String>,
    pub metric: Metric,
    pub symmetric: bool,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.rows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }
}

/// Evaluates `metric` on every pair of an already-transformed group, in order.
pub fn metric_matrix(group: &DatasetGroup, metric: &Metric, seed: u64) -> Result<DistanceMatrix> {
    let plan = MetricPlan::new(group, metric, seed)?;
    let values = plan
        .pairs()
        .into_iter()
        .map(|(i, j)| plan.evaluate(i, j))
        .collect::<Result<Vec<f64>>>()?;
    Ok(plan.assemble(&values))
}

/// Applies the pipeline's space transform once, then evaluates its metric on
/// every pair.
pub fn distance_matrix(group: &DatasetGroup, pipeline: &Pipeline, seed: u64) -> Result<DistanceMatrix> {
    let transformed = pipeline.space.apply(group)?;
    metric_matrix(&transformed, &pipeline.metric, seed)
}

/// Proxy transfer task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", deny_unknown_fields))]
pub enum Task {
    /// Rank-`r` PCA fitted on the source, NMSE on the target.
    Reconstruction { rank: usize },
    /// Nearest class centroid fitted on the source, top-1 accuracy on the target.
    BeamClassification,
}

impl Default for Task {
    fn default() -> Self {
        Task::Reconstruction { rank: DEFAULT_RANK }
    }
}

/// How a task score is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LossKind {
    /// Lower is better.
    NmseDb,
    /// Higher is better.
    Top1Accuracy,
}

impl Task {
    pub fn loss_kind(&self) -> LossKind {
        match self {
            Task::Reconstruction { .. } => LossKind::NmseDb,
            Task::BeamClassification => LossKind::Top1Accuracy,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Task::Reconstruction { rank } => format!("reconstruction(rank={rank})"),
            Task::BeamClassification => "beam_classification".into(),
        }
    }

    /// Score of a model fitted on `source` and evaluated on `target`.
    pub fn score(&self, source: &Dataset, target: &Dataset) -> Result<f64> {
        match *self {
            Task::Reconstruction { rank } => reconstruction_task(source, target, rank),
            Task::BeamClassification => beam_task(source, target),
        }
    }
}

/// `10·log10(Σ‖x − x̂‖² / Σ‖x‖²)` over the target, where `x̂` is the
/// reconstruction through a rank-`rank` PCA fitted on the source.
pub fn reconstruction_task(source: &Dataset, target: &Dataset, rank: usize) -> Result<f64> {
    source.check_comparable(target)?;
    if rank == 0 {
        return Err(invalid!("reconstruction rank must be positive"));
    }
    let energy: f64 = target.rows().map(|x| x.iter().map(|v| v * v).sum::<f64>()).sum();
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let model = PcaModel::fit(source.data(), rank)?;
    let mut recon = vec![0.0; target.dim()];
    let mut error = 0.0;
    for x in target.rows() {
        model.reconstruct_point(x, &mut recon);
        error += squared_euclidean(x, &recon);
    }
    Ok(nmse_db(error, energy))
}

fn nmse_db(error: f64, energy: f64) -> f64 {
    let ratio = error / energy;
    if ratio > 0.0 {
        (10.0 * log10(ratio)).max(NMSE_FLOOR_DB)
    } else {
        NMSE_FLOOR_DB
    }
}

/// Top-1 accuracy on `target` of a nearest-class-centroid classifier fitted
/// on `source`. Target labels the source never saw are always misses.
pub fn beam_task(source: &Dataset, target: &Dataset) -> Result<f64> {
    source.check_comparable(target)?;
    let src_labels = source.require_labels("beam prediction")?;
    let tgt_labels = target.require_labels("beam prediction")?;
    let n = source.dim();
    let mut sums: BTreeMap<Label, (Vec<f64>, usize)> = BTreeMap::new();
    for (x, &l) in source.rows().zip(src_labels) {
        let entry = sums.entry(l).or_insert_with(|| (vec![0.0; n], 0));
        for (s, v) in entry.0.iter_mut().zip(x) {
            *s += v;
        }
        entry.1 += 1;
    }
    let centroids: Vec<(Label, Vec<f64>)> = sums
        .into_iter()
        .map(|(l, (s, c))| (l, s.into_iter().map(|v| v / c as f64).collect()))
        .collect();
    let correct = target
        .rows()
        .zip(tgt_labels)
        .filter(|(x, &l)| nearest_label(&centroids, x) == l)
        .count();
    Ok(correct as f64 / target.len() as f64)
}

fn nearest_label(centroids: &[(Label, Vec<f64>)], x: &[f64]) -> Label {
    let mut best = (centroids[0].0, squared_euclidean(&centroids[0].1, x));
    for (l, c) in &centroids[1..] {
        let d = squared_euclidean(c, x);
        if d < best.1 {
            best = (*l, d);
        }
    }
    best.0
}

/// Transfer scores `s_ij = task(source = D_i, target = D_j)` and drops `ΔP`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    pub scores: Matrix,
    /// `ΔP_ij ≥ 0` means dataset `j` is served worse by a model from `i` than
    /// by its own.
    pub drops: Matrix,
    pub task: Task,
    pub loss_kind: LossKind,
}

impl PerformanceMatrix {
    /// Derives the drops: `s_jj − s_ij` for accuracies, `s_ij − s_jj` for losses.
    pub fn from_scores(scores: Matrix, task: Task) -> Result<Self> {
        let k = scores.rows();
        if scores.cols() != k {
            return Err(invalid!("score matrix must be square, got {}x{}", k, scores.cols()));
        }
        let loss_kind = task.loss_kind();
        let mut drops = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let (own, other) = (scores.get(j, j), scores.get(i, j));
                let d = match loss_kind {
                    LossKind::Top1Accuracy => own - other,
                    LossKind::NmseDb => other - own,
                };
                drops.set(i, j, d);
            }
        }
        Ok(Self {
            scores,
            drops,
            task,
            loss_kind,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.rows() == 0
    }
}

/// Runs `task` on every ordered pair of the group.
pub fn performance_matrix(group: &DatasetGroup, task: Task) -> Result<PerformanceMatrix> {
    let k = group.len();
    let mut scores = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let (src, tgt) = (group.get(i), group.get(j));
            let s = task.score(src, tgt).map_err(|e| Error::Pair {
                metric: task.name(),
                left: src.name().into(),
                right: tgt.name().into(),
                cause: Box::new(e),
            })?;
            scores.set(i, j, s);
        }
    }
    PerformanceMatrix::from_scores(scores, task)
}

/// Correlation between vectorized distances and drops.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// `None` when either vector has zero variance.
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub n_pairs: usize,
    pub include_diagonal: bool,
    /// `(d_ij, ΔP_ij)` in row-major order.
    pub scatter: Vec<(f64, f64)>,
}

/// Correlates `D` with `ΔP`, both vectorized row-major. The diagonal, where
/// `ΔP` is identically zero, is dropped unless `include_diagonal`.
pub fn correlate(dm: &DistanceMatrix, pm: &PerformanceMatrix, include_diagonal: bool) -> Result<CorrelationReport> {
    correlate_matrices(&dm.values, &pm.drops, include_diagonal)
}

pub fn correlate_matrices(d: &Matrix, dp: &Matrix, include_diagonal: bool) -> Result<CorrelationReport> {
    let k = d.rows();
    if d.cols() != k || dp.rows() != k || dp.cols() != k {
        return Err(Error::ShapeMismatch {
            left_rows: d.rows(),
            left_cols: d.cols(),
            right_rows: dp.rows(),
            right_cols: dp.cols(),
        });
    }
    let mut scatter = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            if include_diagonal || i != j {
                scatter.push((d.get(i, j), dp.get(i, j)));
            }
        }
    }
    let x: Vec<f64> = scatter.iter().map(|p| p.0).collect();
    let y: Vec<f64> = scatter.iter().map(|p| p.1).collect();
    Ok(CorrelationReport {
        pearson: pearson(&x, &y),
        spearman: spearman(&x, &y),
        n_pairs: scatter.len(),
        include_diagonal,
        scatter,
    })
}

fn centered(v: &[f64]) -> Option<Vec<f64>> {
    if v.len() < 2 || v.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs());
    if hi - lo <= 4.0 * f64::EPSILON * scale {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    Some(v.iter().map(|x| x - mean).collect())
}

/// Pearson correlation; `None` for fewer than two points, non-finite input
/// or a constant vector.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let (cx, cy) = (centered(x)?, centered(y)?);
    let sxy: f64 = cx.iter().zip(&cy).map(|(a, b)| a * b).sum();
    let sxx: f64 = cx.iter().map(|a| a * a).sum();
    let syy: f64 = cy.iter().map(|b| b * b).sum();
    Some((sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&ranks(x), &ranks(y))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0 + 1.0;
        for &idx in &order[start..end] {
            out[idx] = avg;
        }
        start = end;
    }
    out
}
