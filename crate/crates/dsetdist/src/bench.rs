//! The full loop: load datasets, score transfer on every ordered pair, build
//! each configured distance matrix and correlate it with the drops.

use std::path::Path;

use dsetdist_core::synth::{channels_to_dataset, generate_scene};
use dsetdist_core::transfer::{correlate, CorrelationReport, DistanceMatrix, PerformanceMatrix, Space};
use dsetdist_core::{standardize, DatasetGroup, Matrix};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::config::{DatasetSource, RunConfig};
use crate::io::{load_dataset, FormatError};
use crate::parallel;

pub const UNDEFINED: &str = "undefined (zero variance)";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Compute(#[from] dsetdist_core::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    /// The config file exactly as given.
    pub config: Box<RawValue>,
    pub seed: u64,
    pub task: String,
    pub loss_kind: String,
    pub k: usize,
    pub datasets: Vec<String>,
    pub scores: Vec<Vec<f64>>,
    pub drops: Vec<Vec<f64>>,
    pub results: Vec<PipelineResult>,
    /// Descriptors by decreasing Pearson; undefined correlations last.
    pub ranking: Vec<RankEntry>,
    pub errors: Vec<PipelineError>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineResult {
    pub descriptor: String,
    pub symmetric: bool,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub status: String,
    pub n_pairs: usize,
    pub include_diagonal: bool,
    pub distances: Vec<Vec<f64>>,
    /// `[d_ij, ΔP_ij]` in row-major order.
    pub scatter: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankEntry {
    pub descriptor: String,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineError {
    pub descriptor: String,
    pub message: String,
}

pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.iter_rows().map(<[f64]>::to_vec).collect()
}

/// Loads or generates the run's datasets, standardized if configured.
pub fn load_group(config: &RunConfig) -> Result<DatasetGroup, BenchError> {
    let datasets = match &config.datasets {
        DatasetSource::Files { paths } => paths
            .iter()
            .map(|p| load_dataset(p, None))
            .collect::<Result<Vec<_>, _>>()?,
        DatasetSource::Scene {
            scene,
            preprocess,
            labels,
        } => {
            let scene = generate_scene(scene)?;
            (0..scene.config.n_areas())
                .map(|a| channels_to_dataset(&scene, a, *preprocess, *labels))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let group = DatasetGroup::new(datasets)?;
    Ok(if config.standardize { standardize(&group) } else { group })
}

/// Runs every pipeline. A failing pipeline is recorded in `errors`; a failing
/// transfer task aborts the run.
pub fn run(config: &RunConfig, config_text: &str) -> Result<BenchReport, BenchError> {
    let group = load_group(config)?;
    run_on_group(config, config_text, &group)
}

pub fn run_on_group(config: &RunConfig, config_text: &str, group: &DatasetGroup) -> Result<BenchReport, BenchError> {
    let seed = config.seed();
    log::info!("scoring {} on {} datasets", config.task.name(), group.len());
    let pm = parallel::performance_matrix(group, config.task)?;

    let mut spaces: Vec<(Space, Result<DatasetGroup, dsetdist_core::Error>)> = Vec::new();
    let mut results = Vec::new();
    let mut errors = Vec::new();
    for pipeline in &config.pipelines {
        let descriptor = pipeline.descriptor();
        log::info!("evaluating {descriptor}");
        let idx = match spaces.iter().position(|(s, _)| s == &pipeline.space) {
            Some(i) => i,
            None => {
                spaces.push((pipeline.space.clone(), pipeline.space.apply(group)));
                spaces.len() - 1
            }
        };
        let outcome = match &spaces[idx].1 {
            Ok(transformed) => parallel::metric_matrix(transformed, &pipeline.metric, seed)
                .and_then(|dm| Ok((correlate(&dm, &pm, config.include_diagonal)?, dm))),
            Err(e) => Err(e.clone()),
        };
        match outcome {
            Ok((report, dm)) => results.push(pipeline_result(descriptor, &dm, report)),
            Err(e) => {
                log::error!("{descriptor}: {e}");
                errors.push(PipelineError {
                    descriptor,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(assemble(config, config_text, group, &pm, results, errors))
}

fn pipeline_result(descriptor: String, dm: &DistanceMatrix, report: CorrelationReport) -> PipelineResult {
    let status = if report.pearson.is_some() { "ok" } else { UNDEFINED };
    PipelineResult {
        descriptor,
        symmetric: dm.symmetric,
        pearson: report.pearson,
        spearman: report.spearman,
        status: status.into(),
        n_pairs: report.n_pairs,
        include_diagonal: report.include_diagonal,
        distances: rows(&dm.values),
        scatter: report.scatter.iter().map(|&(d, p)| [d, p]).collect(),
    }
}

fn assemble(
    config: &RunConfig,
    config_text: &str,
    group: &DatasetGroup,
    pm: &PerformanceMatrix,
    results: Vec<PipelineResult>,
    errors: Vec<PipelineError>,
) -> BenchReport {
    let mut ranking: Vec<RankEntry> = results
        .iter()
        .map(|r| RankEntry {
            descriptor: r.descriptor.clone(),
            pearson: r.pearson,
            spearman: r.spearman,
        })
        .collect();
    ranking.sort_by(|a, b| match (a.pearson, b.pearson) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    BenchReport {
        config: RawValue::from_string(config_text.trim().to_owned()).expect("config text was parsed as JSON"),
        seed: config.seed(),
        task: config.task.name(),
        loss_kind: format!("{:?}", pm.loss_kind),
        k: group.len(),
        datasets: group.datasets().iter().map(|d| d.name().to_owned()).collect(),
        scores: rows(&pm.scores),
        drops: rows(&pm.drops),
        results,
        ranking,
        errors,
    }
}

/// Reads a config file, resolving dataset paths against its directory.
pub fn read_config(path: &Path, flag_seed: Option<u64>) -> Result<(RunConfig, String), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut config = RunConfig::from_json(&text, flag_seed).map_err(|e| format!("{}: {e}", path.display()))?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok((config, text))
}

/// The ranking as an aligned text table.
pub fn ranking_table(report: &BenchReport) -> String {
    let width = report.ranking.iter().map(|r| r.descriptor.len()).max().unwrap_or(0).max(8);
    let mut out = format!("{:<4} {:<width$} {:>9} {:>9}\n", "rank", "pipeline", "pearson", "spearman");
    let fmt = |v: Option<f64>| v.map_or_else(|| "undefined".to_owned(), |x| format!("{x:.4}"));
    for (i, r) in report.ranking.iter().enumerate() {
        out.push_str(&format!(
            "{:<4} {:<width$} {:>9} {:>9}\n",
            i + 1,
            r.descriptor,
            fmt(r.pearson),
            fmt(r.spearman)
        ));
    }
    for e in &report.errors {
        out.push_str(&format!("error {}: {}\n", e.descriptor, e.message));
    }
    out
}
