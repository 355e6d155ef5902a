//! Brute-force reference implementations and seeded data generators shared by
//! the integration tests.
#![allow(dead_code)]

use dsetdist_core::{Dataset, Label, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dataset(name: &str, rows: Vec<Vec<f64>>) -> Dataset {
    Dataset::from_rows(name, &rows).unwrap()
}

/// `m` points in `n` dimensions, each coordinate N(center, scale²).
pub fn gaussian(rng: &mut ChaCha8Rng, name: &str, m: usize, n: usize, center: f64, scale: f64) -> Dataset {
    let normal = Normal::new(center, scale).unwrap();
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| normal.sample(rng)).collect()).collect();
    dataset(name, rows)
}

/// A random pair with random shapes, shifts and scales.
pub fn random_pair(rng: &mut ChaCha8Rng, m_max: usize, n_max: usize) -> (Dataset, Dataset) {
    let n = rng.random_range(1..=n_max);
    let (ma, mb) = (rng.random_range(1..=m_max), rng.random_range(1..=m_max));
    let (ca, cb) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let (sa, sb) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
    (gaussian(rng, "a", ma, n, ca, sa), gaussian(rng, "b", mb, n, cb, sb))
}

pub fn with_random_labels(rng: &mut ChaCha8Rng, d: Dataset, n_labels: i64) -> Dataset {
    let labels: Vec<Label> = (0..d.len()).map(|_| rng.random_range(0..n_labels)).collect();
    d.with_labels(labels).unwrap()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn rows(d: &Dataset) -> Vec<Vec<f64>> {
    d.rows().map(<[f64]>::to_vec).collect()
}

pub fn mean_cross_distance(a: &Dataset, b: &Dataset) -> f64 {
    let mut s = 0.0;
    for x in a.rows() {
        for y in b.rows() {
            s += dist(x, y);
        }
    }
    s / (a.len() * b.len()) as f64
}

pub fn centroid_distance(a: &Dataset, b: &Dataset) -> f64 {
    let mean = |d: &Dataset| -> Vec<f64> {
        (0..d.dim()).map(|j| d.rows().map(|r| r[j]).sum::<f64>() / d.len() as f64).collect()
    };
    dist(&mean(a), &mean(b))
}

pub fn energy(a: &Dataset, b: &Dataset) -> f64 {
    2.0 * mean_cross_distance(a, b) - mean_cross_distance(a, a) - mean_cross_distance(b, b)
}

/// Median over distinct pooled pairs.
pub fn median_distance(a: &Dataset, b: &Dataset) -> f64 {
    let pooled: Vec<Vec<f64>> = rows(a).into_iter().chain(rows(b)).collect();
    let mut d = Vec::new();
    for i in 0..pooled.len() {
        for j in 0..i {
            d.push(dist(&pooled[i], &pooled[j]));
        }
    }
    d.sort_by(f64::total_cmp);
    let n = d.len();
    if n % 2 == 1 {
        d[n / 2]
    } else {
        (d[n / 2 - 1] + d[n / 2]) / 2.0
    }
}

pub fn rbf_mmd(a: &Dataset, b: &Dataset) -> f64 {
    let sigma = median_distance(a, b);
    if sigma == 0.0 {
        return 0.0;
    }
    let k = |p: &Dataset, q: &Dataset| {
        let mut s = 0.0;
        for x in p.rows() {
            for y in q.rows() {
                s += (-dist(x, y).powi(2) / (2.0 * sigma * sigma)).exp();
            }
        }
        s / (p.len() * q.len()) as f64
    };
    (k(a, a) + k(b, b) - 2.0 * k(a, b)).max(0.0)
}

/// Largest gap between the two empirical CDFs, evaluated at every sample point.
pub fn ks_scan(x: &[f64], y: &[f64]) -> f64 {
    let cdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    x.iter()
        .chain(y)
        .map(|&t| (cdf(x, t) - cdf(y, t)).abs())
        .fold(0.0, f64::max)
}

/// Optimal transport cost between two uniform empirical measures with cost
/// `|x − y|`, solved as an integer min-cost flow by successive shortest paths.
///
/// Each source point supplies `|y|` units and each sink point demands `|x|`,
/// so every flow is integral; the cost is divided by `|x|·|y|`.
pub fn transport_lp(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (x.len(), y.len());
    let (src, sink) = (mx + my, mx + my + 1);
    let n = mx + my + 2;
    // (to, capacity, cost, reverse index)
    let mut graph: Vec<Vec<(usize, i64, f64, usize)>> = vec![Vec::new(); n];
    let add = |g: &mut Vec<Vec<(usize, i64, f64, usize)>>, u: usize, v: usize, cap: i64, cost: f64| {
        let (ru, rv) = (g[v].len(), g[u].len());
        g[u].push((v, cap, cost, ru));
        g[v].push((u, 0, -cost, rv));
    };
    for i in 0..mx {
        add(&mut graph, src, i, my as i64, 0.0);
        for j in 0..my {
            add(&mut graph, i, mx + j, i64::MAX / 4, (x[i] - y[j]).abs());
        }
    }
    for j in 0..my {
        add(&mut graph, mx + j, sink, mx as i64, 0.0);
    }
    let mut remaining = (mx * my) as i64;
    let mut total = 0.0;
    while remaining > 0 {
        let mut best = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        best[src] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if best[u].is_infinite() {
                    continue;
                }
                for (e, &(v, cap, cost, _)) in graph[u].iter().enumerate() {
                    if cap > 0 && best[u] + cost < best[v] - 1e-12 {
                        best[v] = best[u] + cost;
                        prev[v] = Some((u, e));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut push = remaining;
        let mut v = sink;
        while let Some((u, e)) = prev[v] {
            push = push.min(graph[u][e].1);
            v = u;
        }
        let mut v = sink;
        while let Some((u, e)) = prev[v] {
            let (_, _, cost, rev) = graph[u][e];
            graph[u][e].1 -= push;
            graph[v][rev].1 += push;
            total += push as f64 * cost;
            v = u;
        }
        remaining -= push;
    }
    total / (mx * my) as f64
}

/// Penalty per label: the largest distance between two distinct points carrying it.
pub fn penalty_oracle(datasets: &[Dataset], point: impl Fn(&[f64], &[f64]) -> f64) -> Vec<(Label, f64)> {
    let mut labelled: Vec<(Label, &[f64])> = Vec::new();
    for d in datasets {
        for (row, &l) in d.rows().zip(d.labels().unwrap()) {
            labelled.push((l, row));
        }
    }
    let mut labels: Vec<Label> = labelled.iter().map(|p| p.0).collect();
    labels.sort_unstable();
    labels.dedup();
    labels
        .into_iter()
        .map(|l| {
            let pts: Vec<&[f64]> = labelled.iter().filter(|p| p.0 == l).map(|p| p.1).collect();
            let mut best = 0.0f64;
            for (i, p) in pts.iter().enumerate() {
                for (j, q) in pts.iter().enumerate() {
                    if i != j {
                        best = best.max(point(p, q));
                    }
                }
            }
            (l, best)
        })
        .collect()
}

/// Pearson correlation distance `1 − r` between two points.
pub fn correlation_distance(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 1.0;
    }
    1.0 - sxy / (sxx * syy).sqrt()
}

/// Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
        for u in &q {
            let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            q.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    q
}

pub fn map_rows(d: &Dataset, f: impl Fn(&[f64]) -> Vec<f64>) -> Dataset {
    let out = Dataset::new(
        d.name(),
        Matrix::from_rows(&d.rows().map(f).collect::<Vec<_>>()).unwrap(),
        d.labels().map(<[Label]>::to_vec),
    );
    out.unwrap()
}

pub fn rotate(d: &Dataset, q: &[Vec<f64>]) -> Dataset {
    map_rows(d, |r| q.iter().map(|row| row.iter().zip(r).map(|(a, b)| a * b).sum()).collect())
}

pub fn translate(d: &Dataset, c: &[f64]) -> Dataset {
    map_rows(d, |r| r.iter().zip(c).map(|(a, b)| a + b).collect())
}

/// Principal angles between the top-`k` centered principal subspaces, by
/// power iteration on the covariance with deflation, then greedy maximum
/// cosines between the two bases (power iteration on `UᵀVVᵀU`).
pub fn principal_angles_oracle(a: &Dataset, b: &Dataset, k: usize) -> Vec<f64> {
    let basis = |d: &Dataset| -> Vec<Vec<f64>> {
        let n = d.dim();
        let mean: Vec<f64> = (0..n).map(|j| d.rows().map(|r| r[j]).sum::<f64>() / d.len() as f64).collect();
        let mut cov = vec![vec![0.0; n]; n];
        for r in d.rows() {
            for i in 0..n {
                for j in 0..n {
                    cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
                }
            }
        }
        top_eigenvectors(cov, k)
    };
    let (u, v) = (basis(a), basis(b));
    // M = Uᵀ V (k×k); angles are acos of singular values of M.
    let m: Vec<Vec<f64>> = u
        .iter()
        .map(|ui| v.iter().map(|vj| ui.iter().zip(vj).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let mut mmt = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            mmt[i][j] = (0..k).map(|l| m[i][l] * m[j][l]).sum();
        }
    }
    let vecs = top_eigenvectors(mmt.clone(), k);
    let mut angles: Vec<f64> = vecs
        .iter()
        .map(|x| {
            let mx: Vec<f64> = (0..k).map(|i| (0..k).map(|j| mmt[i][j] * x[j]).sum()).collect();
            let lambda: f64 = mx.iter().zip(x).map(|(a, b)| a * b).sum();
            lambda.max(0.0).sqrt().clamp(-1.0, 1.0).acos()
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
}

fn top_eigenvectors(mut a: Vec<Vec<f64>>, k: usize) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut r = rng(99);
    for _ in 0..k {
        let mut x: Vec<f64> = (0..n).map(|_| r.random::<f64>() - 0.5).collect();
        let mut lambda = 0.0;
        for _ in 0..20000 {
            for u in &out {
                let p: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
            }
            let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * x[j]).sum()).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let next: Vec<f64> = y.iter().map(|v| v / norm).collect();
            let delta: f64 = next.iter().zip(&x).map(|(p, q)| (p - q).abs()).sum();
            x = next;
            lambda = norm;
            if delta < 1e-15 {
                break;
            }
        }
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= lambda * x[i] * x[j];
            }
        }
        out.push(x);
    }
    out
}

pub fn labelled_gaussian(rng: &mut ChaCha8Rng, name: &str, m: usize, n: usize, center: f64, n_labels: i64) -> Dataset {
    let d = gaussian(rng, name, m, n, center, 1.0);
    with_random_labels(rng, d, n_labels)
}
