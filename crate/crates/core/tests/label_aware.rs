mod common;

use common::*;
use dsetdist_core::geometric::{pairwise_euclidean, PointMetric};
use dsetdist_core::supervised::{label_aware_distance, penalty_table, LabelAwareBase, LabelPenaltyTable};
use dsetdist_core::transfer::{metric_matrix, Metric};
use dsetdist_core::{Dataset, DatasetGroup};
use rand::Rng;

fn labelled(name: &str, rows: Vec<Vec<f64>>, labels: Vec<i64>) -> Dataset {
    dataset(name, rows).with_labels(labels).unwrap()
}

#[test]
fn penalty_table_matches_exhaustive_search() {
    let mut r = rng(31);
    for _ in 0..50 {
        let n = r.random_range(1..=5);
        let datasets: Vec<Dataset> = (0..r.random_range(2..5))
            .map(|i| {
                let m = r.random_range(1..20);
                labelled_gaussian(&mut r, &format!("d{i}"), m, n, i as f64, 6)
            })
            .collect();
        let group = DatasetGroup::new(datasets.clone()).unwrap();
        for (metric, oracle) in [
            (PointMetric::Euclidean, penalty_oracle(&datasets, dist)),
            (PointMetric::Correlation, penalty_oracle(&datasets, correlation_distance)),
        ] {
            let table = penalty_table(&group, metric).unwrap();
            assert_eq!(table.len(), oracle.len());
            for (l, want) in oracle {
                let got = table.get(l).unwrap();
                assert!((got - want).abs() <= 1e-12, "label {l}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn two_point_label_penalty() {
    let a = labelled("a", vec![vec![0.0]], vec![7]);
    let b = labelled("b", vec![vec![3.0]], vec![7]);
    let table = penalty_table(&DatasetGroup::new(vec![a, b]).unwrap(), PointMetric::Euclidean).unwrap();
    assert_eq!(table.get(7), Some(3.0));
}

#[test]
fn disjoint_labels_cost_a_quarter_of_the_penalty_sum() {
    let a = labelled("a", vec![vec![0.0, 0.0], vec![4.0, 0.0]], vec![0, 0]);
    let b = labelled("b", vec![vec![0.0, 0.0], vec![0.0, 6.0]], vec![1, 1]);
    let group = DatasetGroup::new(vec![a.clone(), b.clone()]).unwrap();
    let table = penalty_table(&group, PointMetric::Euclidean).unwrap();
    assert_eq!((table.get(0), table.get(1)), (Some(4.0), Some(6.0)));
    let d = label_aware_distance(&a, &b, &table, LabelAwareBase::CentroidEuclidean).unwrap();
    assert_eq!(d, (4.0 + 6.0) / 4.0);
    assert_eq!(d, 2.5);
    let m = metric_matrix(
        &group,
        &Metric::LabelAware {
            base: LabelAwareBase::CentroidEuclidean,
            point_metric: PointMetric::Euclidean,
        },
        0,
    )
    .unwrap();
    assert_eq!(m.get(0, 1), 2.5);
    assert_eq!(m.get(1, 0), 2.5);
}

#[test]
fn identical_labelled_datasets_are_at_zero() {
    let mut r = rng(32);
    for _ in 0..20 {
        let d = labelled_gaussian(&mut r, "a", 25, 3, 0.0, 5);
        let e = d.clone().renamed("b");
        let table = penalty_table(&DatasetGroup::new(vec![d.clone(), e.clone()]).unwrap(), PointMetric::Euclidean).unwrap();
        assert_eq!(label_aware_distance(&d, &e, &table, LabelAwareBase::CentroidEuclidean).unwrap(), 0.0);
    }
}

#[test]
fn a_single_shared_label_reduces_to_the_base_distance() {
    let mut r = rng(33);
    let a = gaussian(&mut r, "a", 12, 2, 0.0, 1.0).with_labels(vec![3; 12]).unwrap();
    let b = gaussian(&mut r, "b", 9, 2, 2.0, 1.0).with_labels(vec![3; 9]).unwrap();
    let table = LabelPenaltyTable::from_map([(3, 100.0)].into_iter().collect());
    let got = label_aware_distance(&a, &b, &table, LabelAwareBase::PairwiseEuclidean).unwrap();
    assert_eq!(got, pairwise_euclidean(&a, &b).unwrap());
}

#[test]
fn a_one_sided_label_adds_exactly_half_its_penalty() {
    let mut r = rng(34);
    for _ in 0..20 {
        let a = labelled_gaussian(&mut r, "a", 20, 2, 0.0, 3);
        let b = labelled_gaussian(&mut r, "b", 20, 2, 1.0, 3);
        let extra = labelled("x", vec![vec![5.0, 5.0], vec![9.0, 2.0]], vec![9, 9]);
        let joined = |d: &Dataset, x: &Dataset| {
            let rows: Vec<Vec<f64>> = d.rows().chain(x.rows()).map(<[f64]>::to_vec).collect();
            let labels = d.labels().unwrap().iter().chain(x.labels().unwrap()).copied().collect();
            labelled(d.name(), rows, labels)
        };
        let a_plus = joined(&a, &extra);
        let table = penalty_table(&DatasetGroup::new(vec![a_plus.clone(), b.clone()]).unwrap(), PointMetric::Euclidean).unwrap();
        let base = LabelAwareBase::CentroidEuclidean;
        let with = label_aware_distance(&a_plus, &b, &table, base).unwrap();
        let without = label_aware_distance(&a, &b, &table, base).unwrap();
        let union = a.label_set().union(&b.label_set()).count() as f64;
        let expected = (without * union + table.get(9).unwrap() / 2.0) / (union + 1.0);
        assert!((with - expected).abs() <= 1e-12);
        assert_eq!(table.get(9), Some(5.0));
    }
}

#[test]
fn a_new_shared_label_leaves_existing_contributions_alone() {
    let mut r = rng(35);
    let a = labelled_gaussian(&mut r, "a", 20, 2, 0.0, 3);
    let b = labelled_gaussian(&mut r, "b", 20, 2, 1.0, 3);
    let union = a.label_set().union(&b.label_set()).count() as f64;
    let shared = [vec![4.0, 4.0], vec![6.0, 1.0]];
    let extend = |d: &Dataset| {
        let rows: Vec<Vec<f64>> = d.rows().map(<[f64]>::to_vec).chain(shared.iter().cloned()).collect();
        let labels = d.labels().unwrap().iter().copied().chain([8, 8]).collect();
        labelled(d.name(), rows, labels)
    };
    let (a2, b2) = (extend(&a), extend(&b));
    let table = penalty_table(&DatasetGroup::new(vec![a2.clone(), b2.clone()]).unwrap(), PointMetric::Euclidean).unwrap();
    let base = LabelAwareBase::CentroidEuclidean;
    let before = label_aware_distance(&a, &b, &table, base).unwrap() * union;
    let after = label_aware_distance(&a2, &b2, &table, base).unwrap() * (union + 1.0);
    assert!((before - after).abs() <= 1e-12);
}
