//! Dense row-major matrices and the handful of decompositions the metrics
//! need: symmetric eigendecomposition (Householder tridiagonalization and
//! implicit QL), one-sided Jacobi singular values, and principal axes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ * self`, exploiting symmetry.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                let g_row = &mut g.data[i * n..(i + 1) * n];
                for j in i..n {
                    g_row[j] += ri * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    /// `self * selfᵀ`.
    pub fn outer_gram(&self) -> Matrix {
        let m = self.rows;
        let mut g = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = dot(self.row(i), self.row(j));
                g.data[i * m + j] = v;
                g.data[j * m + i] = v;
            }
        }
        g
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for row in self.iter_rows() {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        let m = self.rows as f64;
        sums.iter_mut().for_each(|s| *s /= m);
        sums
    }

    /// Copy with `offset` subtracted from every row.
    pub fn centered(&self, offset: &[f64]) -> Matrix {
        let mut out = self.clone();
        for i in 0..out.rows {
            for (v, &c) in out.row_mut(i).iter_mut().zip(offset) {
                *v -= c;
            }
        }
        out
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Stacks matrices with equal column counts.
    pub fn vstack<'a, I>(parts: I) -> Result<Matrix>
    where
        I: IntoIterator<Item = &'a Matrix>,
    {
        let mut out: Option<Matrix> = None;
        for p in parts {
            match &mut out {
                None => out = Some(p.clone()),
                Some(acc) => {
                    if acc.cols != p.cols {
                        return Err(Error::DimensionMismatch {
                            left: acc.cols,
                            right: p.cols,
                        });
                    }
                    acc.data.extend_from_slice(&p.data);
                    acc.rows += p.rows;
                }
            }
        }
        out.ok_or(Error::Empty { rows: 0, cols: 0 })
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sqrt(squared_euclidean(a, b))
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: Matrix,
}

/// Eigendecomposition of a symmetric matrix.
///
/// Householder reduction to tridiagonal form followed by the implicit QL
/// algorithm with Wilkinson shifts (the EISPACK `tred2`/`tql2` pair).
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::ShapeMismatch {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: a.cols(),
            right_cols: a.rows(),
        });
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let mut v = a.data.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    // tql2 rotates columns; keep them as contiguous rows instead.
    let mut z = Matrix { rows: n, cols: n, data: v }.transpose().data;
    tql2(n, &mut z, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let zrow = &z[src * n..(src + 1) * n];
        for (k, &val) in zrow.iter().enumerate() {
            vectors.data[k * n + col] = val;
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// `z` holds eigenvectors as rows: z[i*n + k] is component k of vector i.
fn tql2(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 64 {
                    return Err(Error::InvalidParameter(alloc::string::String::from(
                        "eigen solver failed to converge (non-finite input?)",
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "eigen solver produced non-finite values",
        )));
    }
    Ok(())
}

/// Singular values of `a` in descending order (one-sided Jacobi).
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let a = if a.rows() < a.cols() { a.transpose() } else { a.clone() };
    let (m, n) = (a.rows(), a.cols());
    // columns as contiguous vectors
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= f64::EPSILON * sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for k in 0..m {
                    let x = cp[k];
                    let y = cq[k];
                    cp[k] = c * x - s * y;
                    cq[k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Leading principal axes of row data that is already centered.
#[derive(Debug, Clone)]
pub struct PrincipalAxes {
    /// `features × k`, orthonormal columns.
    pub axes: Matrix,
    /// Variance captured by each axis (sample covariance eigenvalues, `1/(M-1)`).
    pub variances: Vec<f64>,
    /// Numerical rank of the data.
    pub rank: usize,
}

/// Relative eigenvalue threshold below which a direction counts as null.
const RANK_TOL: f64 = 1e-12;

/// Top-`k` right singular vectors of `centered` (equivalently the leading
/// eigenvectors of its covariance). Each axis is signed so its
/// largest-magnitude component is positive.
pub fn principal_axes(centered: &Matrix, k: usize) -> Result<PrincipalAxes> {
    let axes = leading_axes(centered, k)?;
    if k > axes.rank {
        return Err(Error::RankDeficient {
            requested: k,
            achievable: axes.rank,
        });
    }
    Ok(axes)
}

/// Like [`principal_axes`] but silently truncates to the numerical rank.
pub fn leading_axes(centered: &Matrix, k: usize) -> Result<PrincipalAxes> {
    let (m, n) = (centered.rows(), centered.cols());
    let denom = if m > 1 { (m - 1) as f64 } else { 1.0 };
    let (values, mut axes) = if m >= n {
        let eig = symmetric_eigen(&centered.gram())?;
        let take = k.min(n);
        let mut axes = Matrix::zeros(n, take);
        for i in 0..n {
            for j in 0..take {
                axes.set(i, j, eig.vectors.get(i, j));
            }
        }
        (eig.values, axes)
    } else {
        // Fewer rows than features: diagonalize X Xᵀ and map back, v = Xᵀu / σ.
        let eig = symmetric_eigen(&centered.outer_gram())?;
        let take = k.min(m);
        let mut axes = Matrix::zeros(n, take);
        for j in 0..take {
            let lambda = eig.values[j];
            if lambda <= 0.0 {
                continue;
            }
            let sigma = sqrt(lambda);
            for i in 0..n {
                let mut s = 0.0;
                for r in 0..m {
                    s += centered.get(r, i) * eig.vectors.get(r, j);
                }
                axes.set(i, j, s / sigma);
            }
        }
        (eig.values, axes)
    };
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let rank = if top <= 0.0 {
        0
    } else {
        values.iter().filter(|&&v| v > RANK_TOL * top).count()
    };
    let k = k.min(rank);
    if axes.cols() > k {
        let mut trimmed = Matrix::zeros(n, k);
        for i in 0..n {
            for j in 0..k {
                trimmed.set(i, j, axes.get(i, j));
            }
        }
        axes = trimmed;
    }
    orient_columns(&mut axes);
    Ok(PrincipalAxes {
        axes,
        variances: values.iter().take(k).map(|v| v.max(0.0) / denom).collect(),
        rank,
    })
}

/// Flips each column so that its largest-magnitude entry is positive.
pub fn orient_columns(m: &mut Matrix) {
    for j in 0..m.cols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..m.rows() {
            let a = m.get(i, j).abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if m.rows() > 0 && m.get(best, j) < 0.0 {
            for i in 0..m.rows() {
                let v = m.get(i, j);
                m.set(i, j, -v);
            }
        }
    }
}

/// Gram-Schmidt re-orthonormalization of the columns of `m` (two passes).
pub fn orthonormalize_columns(m: &mut Matrix) {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        for _ in 0..2 {
            for p in 0..j {
                let mut proj = 0.0;
                for i in 0..rows {
                    proj += m.get(i, p) * m.get(i, j);
                }
                for i in 0..rows {
                    let v = m.get(i, j) - proj * m.get(i, p);
                    m.set(i, j, v);
                }
            }
        }
        let nrm = sqrt((0..rows).map(|i| m.get(i, j) * m.get(i, j)).sum());
        if nrm > 0.0 {
            for i in 0..rows {
                let v = m.get(i, j) / nrm;
                m.set(i, j, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jacobi_eigenvalues(a: &Matrix) -> Vec<f64> {
        // classic cyclic Jacobi, used as an independent reference
        let n = a.rows();
        let mut m = a.clone();
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m.get(i, j).powi(2))
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m.get(p, q);
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m.get(k, p);
                        let mkq = m.get(k, q);
                        m.set(k, p, c * mkp - s * mkq);
                        m.set(k, q, s * mkp + c * mkq);
                    }
                    for k in 0..n {
                        let mpk = m.get(p, k);
                        let mqk = m.get(q, k);
                        m.set(p, k, c * mpk - s * mqk);
                        m.set(q, k, s * mpk + c * mqk);
                    }
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut s = seed;
        let data = (0..rows * cols)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn eigen_matches_jacobi_and_reconstructs() {
        for seed in 0..5 {
            let x = lcg_matrix(9, 6, seed);
            let a = x.gram();
            let eig = symmetric_eigen(&a).unwrap();
            let reference = jacobi_eigenvalues(&a);
            for (u, v) in eig.values.iter().zip(&reference) {
                assert!((u - v).abs() < 1e-10, "{u} vs {v}");
            }
            // A v = λ v
            for j in 0..6 {
                for i in 0..6 {
                    let av: f64 = (0..6).map(|k| a.get(i, k) * eig.vectors.get(k, j)).sum();
                    assert!((av - eig.values[j] * eig.vectors.get(i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigen_handles_diagonal_and_one_by_one() {
        let a = Matrix::from_rows(&[[3.0, 0.0], [0.0, -1.0]]).unwrap();
        let eig = symmetric_eigen(&a).unwrap();
        assert_eq!(eig.values, std::vec![3.0, -1.0]);
        let one = Matrix::from_rows(&[[2.5]]).unwrap();
        assert_eq!(symmetric_eigen(&one).unwrap().values, std::vec![2.5]);
    }

    #[test]
    fn singular_values_match_eigen_of_gram() {
        let x = lcg_matrix(7, 4, 11);
        let sv = singular_values(&x);
        let eig = symmetric_eigen(&x.gram()).unwrap();
        for (s, l) in sv.iter().zip(&eig.values) {
            assert!((s * s - l).abs() < 1e-10);
        }
        // wide input is transposed internally
        let sv_t = singular_values(&x.transpose());
        for (a, b) in sv.iter().zip(&sv_t) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_axes_both_branches_agree() {
        let x = lcg_matrix(5, 8, 3);
        let means = x.column_means();
        let c = x.centered(&means);
        let wide = principal_axes(&c, 3).unwrap();
        let tall = {
            let eig = symmetric_eigen(&c.gram()).unwrap();
            eig.values
        };
        for (v, t) in wide.variances.iter().zip(&tall) {
            assert!((v * 4.0 - t).abs() < 1e-10);
        }
        // centered 5 rows have rank 4
        assert_eq!(wide.rank, 4);
        assert!(matches!(
            principal_axes(&c, 5),
            Err(Error::RankDeficient { requested: 5, achievable: 4 })
        ));
    }

    #[test]
    fn orientation_makes_largest_entry_positive() {
        let mut m = Matrix::from_rows(&[[0.1, 0.9], [-0.8, -0.2]]).unwrap();
        orient_columns(&mut m);
        assert_eq!(m.column(0), std::vec![-0.1, 0.8]);
        assert_eq!(m.column(1), std::vec![0.9, -0.2]);
    }
}
