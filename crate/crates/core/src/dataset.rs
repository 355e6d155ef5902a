//! Datasets, dataset groups and the elementary preprocessing shared by every
//! metric.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math::sqrt;

/// Integer class label attached to a datapoint.
pub type Label = i64;

/// Columns whose pooled standard deviation falls below this are only centered.
pub const DEGENERATE_STD: f64 = 1e-12;

/// An `M × N` matrix of finite real features with optional per-row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    data: Matrix,
    labels: Option<Vec<Label>>,
}

impl Dataset {
    /// Validates shape and finiteness.
    pub fn new(name: impl Into<String>, data: Matrix, labels: Option<Vec<Label>>) -> Result<Self> {
        let (rows, cols) = (data.rows(), data.cols());
        if rows == 0 || cols == 0 {
            return Err(Error::Empty { rows, cols });
        }
        if let Some(pos) = data.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        if let Some(l) = &labels {
            if l.len() != rows {
                return Err(Error::LabelLength {
                    rows,
                    labels: l.len(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            data,
            labels,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(name: impl Into<String>, rows: &[R]) -> Result<Self> {
        Self::new(name, Matrix::from_rows(rows)?, None)
    }

    pub fn with_labels(self, labels: Vec<Label>) -> Result<Self> {
        Self::new(self.name, self.data, Some(labels))
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    /// Number of datapoints `M`.
    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows() == 0
    }

    /// Feature dimension `N`.
    pub fn dim(&self) -> usize {
        self.data.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.data.row(i)
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.iter_rows()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j)
    }

    pub fn mean(&self) -> Vec<f64> {
        self.data.column_means()
    }

    /// Distinct labels in ascending order; empty when unlabeled.
    pub fn label_set(&self) -> BTreeSet<Label> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().collect())
            .unwrap_or_default()
    }

    pub fn require_labels(&self, what: &'static str) -> Result<&[Label]> {
        self.labels().ok_or_else(|| Error::MissingLabels {
            what,
            dataset: self.name.clone(),
        })
    }

    /// Rows carrying `label`, as a new dataset (`None` when there are none).
    pub fn restrict_to_label(&self, label: Label) -> Option<Dataset> {
        let labels = self.labels.as_ref()?;
        let idx: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            return None;
        }
        Some(Dataset {
            name: alloc::format!("{}[label={}]", self.name, label),
            data: self.data.select_rows(&idx),
            labels: Some(alloc::vec![label; idx.len()]),
        })
    }

    pub fn check_comparable(&self, other: &Dataset) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// `K ≥ 2` datasets sharing a feature dimension, with the union of their
/// label sets.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetGroup {
    datasets: Vec<Dataset>,
    vocabulary: BTreeSet<Label>,
}

impl DatasetGroup {
    pub fn new(datasets: Vec<Dataset>) -> Result<Self> {
        if datasets.len() < 2 {
            return Err(Error::GroupTooSmall(datasets.len()));
        }
        let n = datasets[0].dim();
        for d in &datasets[1..] {
            if d.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: d.dim(),
                });
            }
        }
        let vocabulary = datasets.iter().flat_map(|d| d.label_set()).collect();
        Ok(Self {
            datasets,
            vocabulary,
        })
    }

    pub fn datasets(&self) -> &[Dataset] {
        &self.datasets
    }

    pub fn into_datasets(self) -> Vec<Dataset> {
        self.datasets
    }

    pub fn get(&self, i: usize) -> &Dataset {
        &self.datasets[i]
    }

    /// Number of datasets `K`.
    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.datasets[0].dim()
    }

    pub fn vocabulary(&self) -> &BTreeSet<Label> {
        &self.vocabulary
    }

    pub fn total_points(&self) -> usize {
        self.datasets.iter().map(Dataset::len).sum()
    }

    pub fn all_labeled(&self) -> bool {
        self.datasets.iter().all(|d| d.labels().is_some())
    }

    /// All points stacked in dataset order.
    pub fn pooled(&self) -> Matrix {
        Matrix::vstack(self.datasets.iter().map(Dataset::data)).expect("group members share N")
    }

    /// Pooled labels, `None` unless every dataset is labeled.
    pub fn pooled_labels(&self) -> Option<Vec<Label>> {
        let mut out = Vec::with_capacity(self.total_points());
        for d in &self.datasets {
            out.extend_from_slice(d.labels()?);
        }
        Some(out)
    }

    /// Row ranges of each dataset inside [`pooled`](Self::pooled).
    pub fn offsets(&self) -> Vec<core::ops::Range<usize>> {
        let mut start = 0;
        self.datasets
            .iter()
            .map(|d| {
                let r = start..start + d.len();
                start = r.end;
                r
            })
            .collect()
    }
}

/// Pooled per-feature standardization over every dataset of the group.
///
/// Each column is shifted by the pooled mean and divided by the pooled
/// (population) standard deviation; columns whose pooled deviation is below
/// [`DEGENERATE_STD`] are only centered.
pub fn standardize(group: &DatasetGroup) -> DatasetGroup {
    let n = group.dim();
    let total = group.total_points() as f64;
    let mut mean = alloc::vec![0.0; n];
    for d in group.datasets() {
        for row in d.rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    let mut var = alloc::vec![0.0; n];
    for d in group.datasets() {
        for row in d.rows() {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                let c = v - m;
                *s += c * c;
            }
        }
    }
    let scale: Vec<f64> = var
        .iter()
        .map(|&s| {
            let sd = sqrt(s / total);
            if sd < DEGENERATE_STD {
                1.0
            } else {
                sd
            }
        })
        .collect();

    let datasets = group
        .datasets()
        .iter()
        .map(|d| {
            let mut m = d.data().clone();
            for i in 0..m.rows() {
                for ((v, &mu), &sd) in m.row_mut(i).iter_mut().zip(&mean).zip(&scale) {
                    *v = (*v - mu) / sd;
                }
            }
            Dataset {
                name: d.name.clone(),
                data: m,
                labels: d.labels.clone(),
            }
        })
        .collect();
    DatasetGroup {
        datasets,
        vocabulary: group.vocabulary.clone(),
    }
}

/// Lays a complex `M × P` matrix out as `M × 2P` reals: all real parts, then
/// all imaginary parts.
pub fn complex_to_real(name: impl Into<String>, real: &Matrix, imag: &Matrix) -> Result<Dataset> {
    if real.rows() != imag.rows() || real.cols() != imag.cols() {
        return Err(Error::ShapeMismatch {
            left_rows: real.rows(),
            left_cols: real.cols(),
            right_rows: imag.rows(),
            right_cols: imag.cols(),
        });
    }
    let (m, p) = (real.rows(), real.cols());
    let mut data = Vec::with_capacity(m * 2 * p);
    for i in 0..m {
        data.extend_from_slice(real.row(i));
        data.extend_from_slice(imag.row(i));
    }
    Dataset::new(name, Matrix::new(m, 2 * p, data)?, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ds(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows("t", rows).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_bad_labels() {
        let m = Matrix::new(2, 2, vec![0.0, 1.0, f64::NAN, 2.0]).unwrap();
        assert_eq!(
            Dataset::new("x", m, None).unwrap_err(),
            Error::NonFinite { row: 1, col: 0 }
        );
        let d = ds(&[&[1.0], &[2.0]]);
        assert!(matches!(d.with_labels(vec![1]), Err(Error::LabelLength { .. })));
        assert!(matches!(
            Dataset::new("e", Matrix::zeros(0, 3), None),
            Err(Error::Empty { .. })
        ));
    }

    #[test]
    fn group_requires_two_and_equal_dims() {
        assert_eq!(
            DatasetGroup::new(vec![ds(&[&[1.0]])]).unwrap_err(),
            Error::GroupTooSmall(1)
        );
        let err = DatasetGroup::new(vec![ds(&[&[1.0]]), ds(&[&[1.0, 2.0]])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn vocabulary_is_union_of_label_sets() {
        let a = ds(&[&[1.0], &[2.0]]).with_labels(vec![0, 3]).unwrap();
        let b = ds(&[&[1.0]]).with_labels(vec![5]).unwrap();
        let c = ds(&[&[1.0]]);
        let g = DatasetGroup::new(vec![a, b, c]).unwrap();
        assert_eq!(g.vocabulary().iter().copied().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(!g.all_labeled());
        assert!(g.pooled_labels().is_none());
    }

    #[test]
    fn standardize_constant_column_becomes_zero() {
        let a = ds(&[&[5.0, 1.0], &[5.0, 2.0], &[5.0, 3.0]]);
        let b = ds(&[&[5.0, 0.0]]);
        let g = standardize(&DatasetGroup::new(vec![a, b]).unwrap());
        for d in g.datasets() {
            assert!(d.column(0).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn standardize_pooled_moments_and_idempotence() {
        let a = ds(&[&[1.0, 10.0], &[2.0, -4.0], &[7.0, 3.0]]);
        let b = ds(&[&[-3.0, 8.0], &[0.5, 0.25]]);
        let g = DatasetGroup::new(vec![a, b]).unwrap();
        let s = standardize(&g);
        let pooled = s.pooled();
        for j in 0..2 {
            let col = pooled.column(j);
            let mean: f64 = col.iter().sum::<f64>() / col.len() as f64;
            let var: f64 = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
        let twice = standardize(&s);
        for (x, y) in twice.pooled().as_slice().iter().zip(pooled.as_slice()) {
            assert!((x - y).abs() < 1e-9);
        }
        assert_eq!(s.get(0).len(), 3);
        assert_eq!(s.get(1).len(), 2);
    }

    #[test]
    fn complex_to_real_layout() {
        let re = Matrix::from_rows(&[[1.0]]).unwrap();
        let im = Matrix::from_rows(&[[2.0]]).unwrap();
        let d = complex_to_real("c", &re, &im).unwrap();
        assert_eq!(d.row(0), &[1.0, 2.0]);

        let re = Matrix::from_rows(&[[1.0, -2.0], [3.0, 4.0]]).unwrap();
        let im = Matrix::zeros(2, 2);
        let d = complex_to_real("c", &re, &im).unwrap();
        assert_eq!(d.dim(), 4);
        assert!(d.rows().all(|r| r[2] == 0.0 && r[3] == 0.0));

        let bad = Matrix::zeros(1, 2);
        assert!(matches!(
            complex_to_real("c", &re, &bad),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn complex_split_preserves_frobenius_norm() {
        let re = Matrix::from_rows(&[[1.0, -2.0], [0.5, 4.0]]).unwrap();
        let im = Matrix::from_rows(&[[3.0, 0.25], [-1.0, 2.0]]).unwrap();
        let complex_norm: f64 = re
            .as_slice()
            .iter()
            .zip(im.as_slice())
            .map(|(r, i)| r * r + i * i)
            .sum::<f64>()
            .sqrt();
        let d = complex_to_real("c", &re, &im).unwrap();
        assert!((d.data().frobenius_norm() - complex_norm).abs() < 1e-12);
    }

    #[test]
    fn restrict_to_label_selects_rows() {
        let d = ds(&[&[1.0], &[2.0], &[3.0]]).with_labels(vec![1, 0, 1]).unwrap();
        let r = d.restrict_to_label(1).unwrap();
        assert_eq!(r.column(0), vec![1.0, 3.0]);
        assert!(d.restrict_to_label(9).is_none());
    }
}
