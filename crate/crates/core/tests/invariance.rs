mod common;

use common::*;
use dsetdist_core::geometric::{centroid_euclidean, cluster_euclidean, pairwise_euclidean};
use dsetdist_core::statistical::wasserstein1;
use dsetdist_core::subspace::{asimov, chordal, grassmann, principal_angles};
use dsetdist_core::Dataset;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Anisotropic Gaussian cloud with well separated principal variances.
fn anisotropic(r: &mut rand_chacha::ChaCha8Rng, name: &str, m: usize, n: usize) -> Dataset {
    let q = random_rotation(r, n);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|j| normal.sample(r) * 3.0 * 0.55f64.powi(j as i32)).collect())
        .collect();
    rotate(&dataset(name, rows), &q)
}

#[test]
fn wasserstein_of_a_translated_copy_is_the_shift() {
    let mut r = rng(21);
    for _ in 0..100 {
        let n = r.random_range(1..=5);
        let m = r.random_range(1..=30);
        let a = gaussian(&mut r, "a", m, n, 0.0, 2.0);
        let c: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
        let w = wasserstein1(&a, &translate(&a, &c), None).unwrap();
        for (got, shift) in w.per_feature.iter().zip(&c) {
            assert!((got - shift.abs()).abs() <= 1e-9, "{got} vs {shift}");
        }
    }
}

#[test]
fn euclidean_family_is_translation_invariant() {
    let mut r = rng(22);
    for seed in 0..100 {
        let (a, b) = random_pair(&mut r, 30, 5);
        let c: Vec<f64> = (0..a.dim()).map(|_| r.random_range(-50.0..50.0)).collect();
        let (ta, tb) = (translate(&a, &c), translate(&b, &c));
        let pairs = [
            (pairwise_euclidean(&a, &b).unwrap(), pairwise_euclidean(&ta, &tb).unwrap()),
            (centroid_euclidean(&a, &b).unwrap(), centroid_euclidean(&ta, &tb).unwrap()),
        ];
        for (x, y) in pairs {
            assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
        }
        if a.len() >= 3 && b.len() >= 3 {
            let x = cluster_euclidean(&a, &b, 3, seed).unwrap();
            let y = cluster_euclidean(&ta, &tb, 3, seed).unwrap();
            assert!((x - y).abs() <= 1e-9, "cluster {x} vs {y}");
        }
    }
}

#[test]
fn subspace_distances_are_rotation_invariant() {
    let mut r = rng(23);
    for _ in 0..100 {
        let n = r.random_range(2..=6);
        let k = r.random_range(1..n);
        let a = anisotropic(&mut r, "a", 30, n);
        let b = anisotropic(&mut r, "b", 25, n);
        let q = random_rotation(&mut r, n);
        let before = principal_angles(&a, &b, k).unwrap();
        let after = principal_angles(&rotate(&a, &q), &rotate(&b, &q), k).unwrap();
        for f in [grassmann, chordal, asimov] {
            assert!((f(&before) - f(&after)).abs() <= 1e-8);
        }
        let swapped = principal_angles(&b, &a, k).unwrap();
        assert!((grassmann(&before) - grassmann(&swapped)).abs() <= 1e-8);
    }
}

#[test]
fn principal_angles_match_power_iteration_oracle() {
    let mut r = rng(24);
    for _ in 0..30 {
        let a = anisotropic(&mut r, "a", 40, 5);
        let b = anisotropic(&mut r, "b", 40, 5);
        let got = principal_angles(&a, &b, 2).unwrap();
        let want = principal_angles_oracle(&a, &b, 2);
        for (g, w) in got.angles().iter().zip(&want) {
            assert!((g - w).abs() <= 1e-6, "{:?} vs {want:?}", got.angles());
        }
    }
}

#[test]
fn orthogonal_lines_are_a_right_angle_apart() {
    let a = dataset("a", vec![vec![-1.0, 0.0], vec![0.0, 0.0], vec![2.0, 0.0]]);
    let b = dataset("b", vec![vec![0.0, -3.0], vec![0.0, 1.0], vec![0.0, 5.0]]);
    let pa = principal_angles(&a, &b, 1).unwrap();
    assert!((pa.angles()[0] - core::f64::consts::FRAC_PI_2).abs() <= 1e-9);
    assert!((chordal(&pa) - 1.0).abs() <= 1e-12);
}
