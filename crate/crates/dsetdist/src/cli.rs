//! Command line front end: `gen`, `dist`, `embed`, `bench`, `report`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsetdist_core::embedding::{transform_groups, EmbeddingConfig, EmbeddingMethod, JointEmbedding};
use dsetdist_core::geometric::{PointMetric, DEFAULT_CLUSTERS};
use dsetdist_core::statistical::MmdKernel;
use dsetdist_core::supervised::LabelAwareBase;
use dsetdist_core::synth::{channels_to_dataset, generate_scene, LabelKind, Preprocess, SceneConfig};
use dsetdist_core::transfer::{Metric, Space};
use dsetdist_core::{standardize, Dataset, DatasetGroup};
use serde::Serialize;

use crate::bench::{self, BenchReport};
use crate::io::{self, FileFormat};
use crate::{parallel, svg};

#[derive(Debug, Parser)]
#[command(name = "dsetdist", version, about = "Dataset distances and transferability correlation")]
pub struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "DSETDIST_THREADS")]
    pub threads: Option<usize>,
    /// Seed for every stochastic component.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a channel scene and write one dataset per area.
    Gen(GenArgs),
    /// Distance between two datasets, or the matrix over several.
    Dist(DistArgs),
    /// Fit a joint embedding and write the embedded datasets.
    Embed(EmbedArgs),
    /// Correlate configured distances with transfer drops.
    Bench(BenchArgs),
    /// Print the ranking of a bench report and render its plots.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PreprocessArg {
    AngleDelay,
    Raw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabelArg {
    Beam,
    Los,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Dsd,
    Csv,
}

impl From<FormatArg> for FileFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dsd => FileFormat::Dsd,
            FormatArg::Csv => FileFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Scene config JSON; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "angle-delay")]
    pub preprocess: PreprocessArg,
    #[arg(long, value_enum, default_value = "beam")]
    pub labels: LabelArg,
    #[arg(long, value_enum, default_value = "dsd")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PointMetricArg {
    Euclidean,
    Correlation,
}

impl From<PointMetricArg> for PointMetric {
    fn from(p: PointMetricArg) -> Self {
        match p {
            PointMetricArg::Euclidean => PointMetric::Euclidean,
            PointMetricArg::Correlation => PointMetric::Correlation,
        }
    }
}

/// Embedding parameters shared by `dist` and `embed`.
#[derive(Debug, Clone, Args)]
pub struct EmbeddingArgs {
    #[arg(long, default_value_t = 32)]
    pub neighbors: usize,
    #[arg(long, default_value_t = 0.1)]
    pub min_dist: f64,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub point_metric: PointMetricArg,
    /// PCA pre-reduction before the neighbor graph; 0 disables it.
    #[arg(long, default_value_t = 100)]
    pub prereduce: usize,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// Down-weight edges between differently labeled points.
    #[arg(long)]
    pub supervised: bool,
    #[arg(long, default_value_t = 0.1)]
    pub label_repulsion: f64,
}

impl EmbeddingArgs {
    fn config(&self, method: EmbeddingMethod, out_dims: usize, seed: u64) -> EmbeddingConfig {
        EmbeddingConfig {
            method,
            out_dims,
            n_neighbors: self.neighbors,
            min_dist: self.min_dist,
            point_metric: self.point_metric.into(),
            pca_prereduce: (self.prereduce > 0).then_some(self.prereduce),
            epochs: self.epochs,
            seed,
            supervised: self.supervised,
            label_repulsion: self.label_repulsion,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaseArg {
    CentroidEuclidean,
    PairwiseEuclidean,
    ClusterEuclidean,
    Cosine,
    Wasserstein,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// kl, js, hellinger, tv, wasserstein, ks, energy, mmd-linear, mmd-rbf,
    /// pairwise-euclidean, centroid-euclidean, cluster-euclidean, cosine,
    /// grassmann, chordal, asimov, pad, label-aware, constant.
    #[arg(long)]
    pub metric: String,
    /// raw, pca<N>, graph<N> (alias umap<N>) or imported.
    #[arg(long, default_value = "raw")]
    pub space: String,
    /// Pooled coordinates (DSD) to use instead of fitting; implies `--space imported`.
    #[arg(long)]
    pub import_embedding: Option<PathBuf>,
    #[arg(long)]
    pub standardize: bool,
    /// Histogram bins per feature.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Clusters, or subspace dimension for grassmann / chordal / asimov.
    #[arg(long)]
    pub k: Option<usize>,
    /// Base distance of the label-aware metric.
    #[arg(long, value_enum, default_value = "centroid-euclidean")]
    pub base: BaseArg,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    #[arg(required = true, num_args = 2..)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long, value_enum, default_value = "graph")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long)]
    pub standardize: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    #[arg(required = true, num_args = 2..)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Graph,
    Pca,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for SVG plots.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A report written by `bench`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ErrorList {
    errors: Vec<ErrorEntry>,
}

#[derive(Debug, Serialize)]
struct ErrorEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pipeline: Option<String>,
    message: String,
}

fn fail(errors: Vec<ErrorEntry>) -> ExitCode {
    let json = serde_json::to_string(&ErrorList { errors }).expect("error list serializes");
    eprintln!("{json}");
    ExitCode::FAILURE
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    run(cli)
}

pub fn run(cli: Cli) -> ExitCode {
    let threads = cli.threads;
    let seed = cli.seed;
    let result = match cli.command {
        Command::Gen(args) => parallel::with_threads(threads, || cmd_gen(&args, seed)),
        Command::Dist(args) => parallel::with_threads(threads, || cmd_dist(&args, seed.unwrap_or(0))),
        Command::Embed(args) => parallel::with_threads(threads, || cmd_embed(&args, seed.unwrap_or(0))),
        Command::Bench(args) => return cmd_bench(&args, seed, threads),
        Command::Report(args) => cmd_report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => fail(vec![ErrorEntry {
            pipeline: None,
            message,
        }]),
    }
}

type CmdResult = Result<(), String>;

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn create_dir(path: &Path) -> CmdResult {
    fs::create_dir_all(path).map_err(|e| format!("{}: {e}", path.display()))
}

#[derive(Debug, Serialize)]
struct Manifest {
    config: SceneConfig,
    preprocess: Preprocess,
    labels: Option<LabelKind>,
    users: usize,
    features: usize,
    areas: Vec<AreaEntry>,
}

#[derive(Debug, Serialize)]
struct AreaEntry {
    area: usize,
    file: Option<String>,
    users: usize,
    los: usize,
    nlos: usize,
    beams: BTreeMap<usize, usize>,
}

fn cmd_gen(args: &GenArgs, seed: Option<u64>) -> CmdResult {
    let mut value = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => serde_json::Value::Object(Default::default()),
    };
    // a seed in the config wins over the flag
    if let (Some(s), Some(map)) = (seed, value.as_object_mut()) {
        map.entry("seed").or_insert(s.into());
    }
    let config: SceneConfig = serde_json::from_value(value).map_err(|e| format!("scene config: {e}"))?;
    let preprocess = match args.preprocess {
        PreprocessArg::AngleDelay => Preprocess::AngleDelay,
        PreprocessArg::Raw => Preprocess::Raw,
    };
    let labels = match args.labels {
        LabelArg::Beam => Some(LabelKind::Beam),
        LabelArg::Los => Some(LabelKind::Los),
        LabelArg::None => None,
    };
    let format = FileFormat::from(args.format);
    let scene = generate_scene(&config).map_err(|e| e.to_string())?;
    create_dir(&args.out)?;
    let mut areas = Vec::new();
    let mut features = 0;
    for area in 0..config.n_areas() {
        let users: Vec<_> = scene.users_in_area(area).collect();
        let mut beams = BTreeMap::new();
        for u in &users {
            *beams.entry(u.beam).or_insert(0) += 1;
        }
        let los = users.iter().filter(|u| u.los).count();
        let file = if users.is_empty() {
            log::warn!("area {area} has no users; no file written");
            None
        } else {
            let ds = channels_to_dataset(&scene, area, preprocess, labels).map_err(|e| e.to_string())?;
            features = ds.dim();
            let name = format!("{}.{}", ds.name(), format.extension());
            io::save_dataset(&ds, &args.out.join(&name), Some(format)).map_err(|e| e.to_string())?;
            Some(name)
        };
        areas.push(AreaEntry {
            area,
            file,
            users: users.len(),
            los,
            nlos: users.len() - los,
            beams,
        });
    }
    let manifest = Manifest {
        config,
        preprocess,
        labels,
        users: scene.users.len(),
        features,
        areas,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&args.out.join("manifest.json"), json + "\n")?;
    println!("wrote {} areas, {} users to {}", manifest.areas.len(), manifest.users, args.out.display());
    Ok(())
}

fn load_group(files: &[PathBuf], standardized: bool) -> Result<DatasetGroup, String> {
    let datasets = files
        .iter()
        .map(|p| io::load_dataset(p, None))
        .collect::<Result<Vec<Dataset>, _>>()
        .map_err(|e| e.to_string())?;
    let group = DatasetGroup::new(datasets).map_err(|e| e.to_string())?;
    Ok(if standardized { standardize(&group) } else { group })
}

/// Parses `raw`, `pca<N>`, `graph<N>` / `umap<N>` and `imported`.
pub fn parse_space(text: &str, embedding: &EmbeddingArgs, seed: u64) -> Result<Space, String> {
    let dims = |rest: &str| -> Result<usize, String> {
        match rest.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("bad dimension in space `{text}`")),
        }
    };
    let lower = text.to_ascii_lowercase();
    if lower == "raw" {
        Ok(Space::Raw)
    } else if lower == "imported" {
        Ok(Space::Imported)
    } else if let Some(rest) = lower.strip_prefix("pca") {
        Ok(Space::Embedded(embedding.config(EmbeddingMethod::Pca, dims(rest)?, seed)))
    } else if let Some(rest) = lower.strip_prefix("graph").or_else(|| lower.strip_prefix("umap")) {
        Ok(Space::Embedded(embedding.config(EmbeddingMethod::Graph, dims(rest)?, seed)))
    } else {
        Err(format!("unknown space `{text}`; use raw, pca<N>, graph<N> or imported"))
    }
}

/// Builds a metric from its command line name and parameters.
pub fn parse_metric(args: &DistArgs) -> Result<Metric, String> {
    let bins = args.bins;
    let name = args.metric.to_ascii_lowercase().replace('_', "-");
    Ok(match name.as_str() {
        "kl" => Metric::KlDivergence { bins },
        "js" | "jensen-shannon" => Metric::JensenShannon { bins },
        "hellinger" => Metric::Hellinger { bins },
        "tv" | "total-variation" => Metric::TotalVariation { bins },
        "wasserstein" => Metric::Wasserstein { weights: None },
        "ks" | "kolmogorov-smirnov" => Metric::KolmogorovSmirnov,
        "energy" => Metric::Energy,
        "mmd-linear" => Metric::Mmd { kernel: MmdKernel::Linear },
        "mmd" | "mmd-rbf" => Metric::Mmd { kernel: MmdKernel::Rbf },
        "pairwise-euclidean" => Metric::PairwiseEuclidean,
        "centroid-euclidean" => Metric::CentroidEuclidean,
        "cluster-euclidean" => Metric::ClusterEuclidean {
            k: args.k.unwrap_or(DEFAULT_CLUSTERS),
            seed: None,
        },
        "cosine" => Metric::Cosine,
        "grassmann" => Metric::Grassmann { k: args.k },
        "chordal" => Metric::Chordal { k: args.k },
        "asimov" => Metric::Asimov { k: args.k },
        "pad" | "proxy-a" => Metric::ProxyA { seed: None },
        "label-aware" => Metric::LabelAware {
            base: match args.base {
                BaseArg::CentroidEuclidean => LabelAwareBase::CentroidEuclidean,
                BaseArg::PairwiseEuclidean => LabelAwareBase::PairwiseEuclidean,
                BaseArg::ClusterEuclidean => LabelAwareBase::ClusterEuclidean {
                    k: args.k.unwrap_or(DEFAULT_CLUSTERS),
                    seed: 0,
                },
                BaseArg::Cosine => LabelAwareBase::Cosine,
                BaseArg::Wasserstein => LabelAwareBase::Wasserstein,
            },
            point_metric: args.embedding.point_metric.into(),
        },
        "constant" => Metric::Constant,
        other => return Err(format!("unknown metric `{other}`")),
    })
}

/// Replaces the group's points with externally computed pooled coordinates.
fn import_embedding(group: &DatasetGroup, path: &Path) -> Result<DatasetGroup, String> {
    let coords = io::load_dataset(path, Some(FileFormat::Dsd)).map_err(|e| e.to_string())?;
    let emb = JointEmbedding::from_coordinates(group, coords.data().clone()).map_err(|e| e.to_string())?;
    transform_groups(&emb).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct DistOutput {
    descriptor: String,
    names: Vec<String>,
    distances: Vec<Vec<f64>>,
}

fn cmd_dist(args: &DistArgs, seed: u64) -> CmdResult {
    let metric = parse_metric(args)?;
    let space = if args.import_embedding.is_some() {
        Space::Imported
    } else {
        parse_space(&args.space, &args.embedding, seed)?
    };
    let group = load_group(&args.files, args.standardize)?;
    let group = match (&space, &args.import_embedding) {
        (_, Some(path)) => import_embedding(&group, path)?,
        (Space::Imported, None) => return Err("`--space imported` needs `--import-embedding`".into()),
        (space, None) => space.apply(&group).map_err(|e| e.to_string())?,
    };
    let dm = parallel::metric_matrix(&group, &metric, seed).map_err(|e| e.to_string())?;
    let descriptor = format!("{}@{}", metric.name(), space.name());
    if args.json {
        let out = DistOutput {
            descriptor,
            names: dm.names.clone(),
            distances: bench::rows(&dm.values),
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("distances serialize"));
    } else if dm.len() == 2 {
        println!("{}", dm.get(0, 1));
    } else {
        println!("\t{}", dm.names.join("\t"));
        for (i, name) in dm.names.iter().enumerate() {
            let row: Vec<String> = dm.values.row(i).iter().map(|v| v.to_string()).collect();
            println!("{name}\t{}", row.join("\t"));
        }
    }
    Ok(())
}

fn cmd_embed(args: &EmbedArgs, seed: u64) -> CmdResult {
    let method = match args.method {
        MethodArg::Graph => EmbeddingMethod::Graph,
        MethodArg::Pca => EmbeddingMethod::Pca,
    };
    let config = args.embedding.config(method, args.dims, seed);
    let group = load_group(&args.files, args.standardize)?;
    let emb = config.fit(&group).map_err(|e| e.to_string())?;
    let embedded = transform_groups(&emb).map_err(|e| e.to_string())?;
    create_dir(&args.out)?;
    for d in embedded.datasets() {
        io::save_dataset(d, &args.out.join(format!("{}.dsd", d.name())), Some(FileFormat::Dsd))
            .map_err(|e| e.to_string())?;
    }
    let pooled = Dataset::new("pooled", emb.coordinates().clone(), embedded.pooled_labels()).map_err(|e| e.to_string())?;
    io::save_dataset(&pooled, &args.out.join("pooled.dsd"), Some(FileFormat::Dsd)).map_err(|e| e.to_string())?;
    println!(
        "embedded {} datasets into {} dims under {}",
        embedded.len(),
        emb.out_dims(),
        args.out.display()
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs, seed: Option<u64>, threads: Option<usize>) -> ExitCode {
    let (config, text) = match bench::read_config(&args.config, seed) {
        Ok(c) => c,
        Err(message) => return fail(vec![ErrorEntry { pipeline: None, message }]),
    };
    let threads = config.threads.or(threads);
    let report = match parallel::with_threads(threads, || bench::run(&config, &text)) {
        Ok(r) => r,
        Err(e) => {
            return fail(vec![ErrorEntry {
                pipeline: None,
                message: e.to_string(),
            }])
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let mut errors: Vec<ErrorEntry> = report
        .errors
        .iter()
        .map(|e| ErrorEntry {
            pipeline: Some(e.descriptor.clone()),
            message: e.message.clone(),
        })
        .collect();
    if let Err(message) = write_file(&args.out, json) {
        errors.push(ErrorEntry { pipeline: None, message });
    }
    if let Some(dir) = &args.svg {
        if let Err(message) = write_svgs(&report, dir) {
            errors.push(ErrorEntry { pipeline: None, message });
        }
    }
    print!("{}", bench::ranking_table(&report));
    if errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        fail(errors)
    }
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_owned()
}

/// Writes the drop heatmap plus a distance heatmap and scatter per pipeline.
pub fn write_svgs(report: &BenchReport, dir: &Path) -> CmdResult {
    create_dir(dir)?;
    write_file(
        &dir.join("drops.svg"),
        svg::heatmap(&report.drops, &report.datasets, &format!("ΔP, {}", report.task)),
    )?;
    for (i, r) in report.results.iter().enumerate() {
        let stem = format!("{i:02}_{}", slug(&r.descriptor));
        write_file(
            &dir.join(format!("{stem}_distances.svg")),
            svg::heatmap(&r.distances, &report.datasets, &r.descriptor),
        )?;
        let title = match r.pearson {
            Some(p) => format!("{} (pearson {p:.3})", r.descriptor),
            None => format!("{} ({})", r.descriptor, bench::UNDEFINED),
        };
        write_file(
            &dir.join(format!("{stem}_scatter.svg")),
            svg::scatter(&r.scatter, &title, "distance", "ΔP"),
        )?;
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> CmdResult {
    let text = fs::read_to_string(&args.input).map_err(|e| format!("{}: {e}", args.input.display()))?;
    let report: BenchReport = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", args.input.display()))?;
    print!("{}", bench::ranking_table(&report));
    if let Some(dir) = &args.svg {
        write_svgs(&report, dir)?;
    }
    Ok(())
}
