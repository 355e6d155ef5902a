//! Thread-parallel versions of the core matrix builders.
//!
//! Pairs are evaluated in any order and placed by index, so the output is
//! identical to the sequential builders for every thread count.

use dsetdist_core::transfer::{DistanceMatrix, Metric, MetricPlan, PerformanceMatrix, Pipeline, Task};
use dsetdist_core::{DatasetGroup, Error, Matrix, Result};
use rayon::prelude::*;

pub fn metric_matrix(group: &DatasetGroup, metric: &Metric, seed: u64) -> Result<DistanceMatrix> {
    let plan = MetricPlan::new(group, metric, seed)?;
    let values = plan
        .pairs()
        .into_par_iter()
        .map(|(i, j)| plan.evaluate(i, j))
        .collect::<Result<Vec<f64>>>()?;
    Ok(plan.assemble(&values))
}

pub fn distance_matrix(group: &DatasetGroup, pipeline: &Pipeline, seed: u64) -> Result<DistanceMatrix> {
    let transformed = pipeline.space.apply(group)?;
    metric_matrix(&transformed, &pipeline.metric, seed)
}

pub fn performance_matrix(group: &DatasetGroup, task: Task) -> Result<PerformanceMatrix> {
    let k = group.len();
    let scores = (0..k * k)
        .into_par_iter()
        .map(|idx| {
            let (src, tgt) = (group.get(idx / k), group.get(idx % k));
            task.score(src, tgt).map_err(|e| Error::Pair {
                metric: task.name(),
                left: src.name().into(),
                right: tgt.name().into(),
                cause: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    PerformanceMatrix::from_scores(Matrix::new(k, k, scores)?, task)
}

/// Runs `f` on a pool with `threads` workers (rayon's default when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
