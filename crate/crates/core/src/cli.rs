//! `freegad` command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 configuration error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::bench::{peak_rss_bytes, run_scaling, BenchConfig, BenchSize};
use crate::encoder::{EncoderConfig, SimilarityMode, DEFAULT_SIGMA};
use crate::error::Error;
use crate::grid::{grid_search, random_search, GridSpec, SearchBase, SearchResult};
use crate::io::{self, Preprocessing, SyntheticParams};
use crate::metrics::{auprc, auroc, LabeledScores};
use crate::pipeline::{self, PipelineConfig, Stage, StageError};
use crate::scoring::{ScoringConfig, StatMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "freegad", version, about = "Training-free graph anomaly detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every node of a dataset.
    Score(ScoreArgs),
    /// Report AUROC and AUPRC of a score file.
    Eval(EvalArgs),
    /// Search hyperparameters on a labeled dataset.
    Grid(GridArgs),
    /// Write a synthetic dataset with injected anomalies.
    Generate(GenerateArgs),
    /// Time the pipeline on generated graphs of increasing size.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,
    #[arg(long = "sim-mode", value_enum, default_value_t = SimilarityMode::SquaredNorm)]
    pub sim_mode: SimilarityMode,
    #[arg(long = "stat-mode", value_enum, default_value_t = StatMode::Sum)]
    pub stat_mode: StatMode,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "FREEGAD_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PrepArgs {
    /// Scale feature rows to unit L2 norm at load time.
    #[arg(long = "row-normalize")]
    pub row_normalize: bool,
    /// Standardize feature columns at load time.
    #[arg(long)]
    pub standardize: bool,
}

impl PrepArgs {
    fn preprocessing(&self) -> Preprocessing {
        Preprocessing {
            row_l2: self.row_normalize,
            standardize: self.standardize,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long = "L", default_value_t = 2)]
    pub layers: usize,
    /// Anchors per side [default: min(10, n/2)].
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Score file written by `score`.
    #[arg(long)]
    pub scores: PathBuf,
    /// Labels file; defaults to the label column of the score file.
    #[arg(long, conflicts_with = "dataset")]
    pub labels: Option<PathBuf>,
    /// Dataset directory whose labels.tsv to use.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long = "L", value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 12, 16, 20])]
    pub layers: Vec<usize>,
    #[arg(long = "K", value_delimiter = ',', default_values_t = [10usize, 20, 50, 100])]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0])]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0])]
    pub beta: Vec<f64>,
    /// Run this many seeded random trials instead of the grid.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow L and K outside [1, 20] and [10, 100].
    #[arg(long = "no-range-check")]
    pub no_range_check: bool,
    /// Write the full results table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "n-struct", default_value_t = 3)]
    pub n_struct: usize,
    #[arg(long = "n-ctx", default_value_t = 15)]
    pub n_ctx: usize,
    #[arg(long = "clique-size", default_value_t = 5)]
    pub clique_size: usize,
    #[arg(long = "avg-degree", default_value_t = 10.0)]
    pub avg_degree: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Target undirected edge counts.
    #[arg(long, value_delimiter = ',', conflicts_with = "nodes")]
    pub edges: Vec<usize>,
    /// Node counts.
    #[arg(long, value_delimiter = ',')]
    pub nodes: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    #[arg(long = "L", default_value_t = 8)]
    pub layers: usize,
    #[arg(long = "K", default_value_t = 50)]
    pub k: usize,
    #[arg(long = "avg-degree", default_value_t = 10.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, env = "FREEGAD_THREADS")]
    pub threads: Option<usize>,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn code_for(e: &Error) -> i32 {
    if e.is_config_error() {
        EXIT_CONFIG
    } else {
        EXIT_DATA
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: code_for(&e),
            message: e.to_string(),
        }
    }
}

impl From<StageError> for CliError {
    fn from(e: StageError) -> Self {
        CliError {
            code: code_for(&e.error),
            message: e.to_string(),
        }
    }
}

fn staged<T>(stage: Stage, r: crate::Result<T>) -> Result<T, CliError> {
    r.map_err(|error| StageError { stage, error }.into())
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads.filter(|&t| t > 0) {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError {
        code: EXIT_CONFIG,
        message: format!("cannot start worker threads: {e}"),
    })?;
    Ok(pool.install(f))
}

/// Wall-clock accounting of one `score` run.
#[derive(Debug, Clone)]
pub struct ScoreReport {
    pub stages: Vec<(Stage, Duration)>,
    pub total: Duration,
    pub peak_rss_bytes: Option<u64>,
    pub n: usize,
}

impl ScoreReport {
    pub fn stage_sum(&self) -> Duration {
        self.stages.iter().map(|(_, d)| *d).sum()
    }
}

fn run_metadata(dataset: &io::Dataset, cfg: &PipelineConfig, prep: &Preprocessing) -> String {
    format!(
        "dataset = \"{}\"\nn = {}\nL = {}\nK = {}\nalpha = {:?}\nbeta = {:?}\nsigma = {:?}\nsim_mode = \"{}\"\nstat_mode = \"{}\"\npreprocessing = \"{}\"\n",
        dataset.name,
        dataset.n(),
        cfg.encoder.layers,
        cfg.k,
        cfg.scoring.alpha,
        cfg.scoring.beta,
        cfg.encoder.sigma,
        cfg.encoder.similarity,
        cfg.scoring.stat,
        prep.describe(),
    )
}

const DEFAULT_K: usize = 10;

/// Anchor count used when `--K` is omitted: 10, or fewer on graphs too small for it.
pub fn default_k(n: usize) -> usize {
    DEFAULT_K.min(n / 2).max(1)
}

/// Path of the run-metadata file written next to a score file.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn cmd_score(args: &ScoreArgs) -> Result<ScoreReport, CliError> {
    let start = Instant::now();
    let prep = args.prep.preprocessing();
    let mut cfg = PipelineConfig {
        encoder: EncoderConfig {
            layers: args.layers,
            sigma: args.common.sigma,
            similarity: args.common.sim_mode,
            retain_layers: false,
        },
        k: args.k.unwrap_or(DEFAULT_K),
        scoring: ScoringConfig {
            alpha: args.alpha,
            beta: args.beta,
            stat: args.common.stat_mode,
        },
    };
    cfg.validate()?;

    with_threads(args.common.threads, || {
        let t = Instant::now();
        let dataset = staged(Stage::Load, io::load_dataset_with(&args.dataset, &prep))?;
        let load = t.elapsed();
        if args.k.is_none() {
            cfg.k = default_k(dataset.n());
        }

        let out = pipeline::run(&dataset.graph, &dataset.features, &cfg)?;

        let t = Instant::now();
        staged(
            Stage::Write,
            io::save_scores(&out.scores, dataset.labels.as_deref(), &args.out),
        )?;
        let meta = metadata_path(&args.out);
        staged(
            Stage::Write,
            fs::write(&meta, run_metadata(&dataset, &cfg, &prep)).map_err(|e| Error::Io {
                path: meta.clone(),
                source: e,
            }),
        )?;
        let write = t.elapsed();

        let report = ScoreReport {
            stages: vec![
                (Stage::Load, load),
                (Stage::Encode, out.timings.encode),
                (Stage::Anchors, out.timings.anchors),
                (Stage::Score, out.timings.score),
                (Stage::Write, write),
            ],
            total: start.elapsed(),
            peak_rss_bytes: peak_rss_bytes(),
            n: dataset.n(),
        };
        for (stage, d) in &report.stages {
            log::info!("stage {:<8} {:.6}s", stage.name(), d.as_secs_f64());
        }
        log::info!("total          {:.6}s", report.total.as_secs_f64());
        if let Some(b) = report.peak_rss_bytes {
            log::info!("peak resident memory {:.1} MiB", b as f64 / (1024.0 * 1024.0));
        }
        Ok(report)
    })?
}

/// AUROC and AUPRC in percent, two decimals.
pub fn format_metrics(auroc: f64, auprc: f64) -> String {
    format!("AUROC\t{:.2}\nAUPRC\t{:.2}\n", 100.0 * auroc, 100.0 * auprc)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<String, CliError> {
    let file = io::load_scores(&args.scores)?;
    let labels = match (&args.labels, &args.dataset) {
        (Some(p), _) => io::read_labels(p)?,
        (None, Some(dir)) => io::read_labels(&dir.join(io::LABELS_FILE))?,
        (None, None) => file.labels.clone().ok_or_else(|| CliError {
            code: EXIT_DATA,
            message: "score file has no label column; pass --labels or --dataset".into(),
        })?,
    };
    let ls = LabeledScores::new(file.scores, labels)?;
    Ok(format_metrics(auroc(&ls)?, auprc(&ls)?))
}

pub fn render_trials(result: &SearchResult) -> String {
    let mut s = String::from("L\tK\talpha\tbeta\tauroc\tauprc\n");
    for t in &result.trials {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            t.config.encoder.layers, t.config.k, t.config.scoring.alpha, t.config.scoring.beta, t.auroc, t.auprc
        );
    }
    s
}

pub fn render_best(result: &SearchResult) -> String {
    let b = result.best_trial();
    format!(
        "best\tL={}\tK={}\talpha={}\tbeta={}\tAUROC={:.2}\tAUPRC={:.2}\n",
        b.config.encoder.layers,
        b.config.k,
        b.config.scoring.alpha,
        b.config.scoring.beta,
        100.0 * b.auroc,
        100.0 * b.auprc
    )
}

pub fn cmd_grid(args: &GridArgs) -> Result<(SearchResult, String), CliError> {
    let base = SearchBase {
        sigma: args.common.sigma,
        similarity: args.common.sim_mode,
        stat: args.common.stat_mode,
        strict_ranges: !args.no_range_check,
    };
    with_threads(args.common.threads, || {
        let dataset = staged(Stage::Load, io::load_dataset_with(&args.dataset, &args.prep.preprocessing()))?;
        let labels = dataset.labels.as_deref().ok_or_else(|| CliError {
            code: EXIT_DATA,
            message: format!("dataset {} has no labels", args.dataset.display()),
        })?;
        let result = match args.random {
            Some(trials) => random_search(&dataset.graph, &dataset.features, labels, trials, args.seed, &base)?,
            None => {
                let spec = GridSpec {
                    layers: args.layers.clone(),
                    ks: args.k.clone(),
                    alphas: args.alpha.clone(),
                    betas: args.beta.clone(),
                };
                grid_search(&dataset.graph, &dataset.features, labels, &spec, &base)?
            }
        };
        let table = render_trials(&result);
        let mut text = render_best(&result);
        match &args.out {
            Some(p) => fs::write(p, &table).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?,
            None => text.push_str(&table),
        }
        Ok((result, text))
    })?
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<String, CliError> {
    let params = SyntheticParams {
        n: args.n,
        m: args.m,
        seed: args.seed,
        n_struct: args.n_struct,
        n_ctx: args.n_ctx,
        clique_size: args.clique_size,
        avg_degree: args.avg_degree,
        communities: SyntheticParams::default().communities.min(args.n.max(1)),
        ..Default::default()
    };
    let dataset = io::generate(&params)?;
    io::save_dataset(&dataset, &args.out)?;
    Ok(format!(
        "wrote {} (n={}, edges={}, m={}) to {}\n",
        dataset.name,
        dataset.n(),
        dataset.graph.num_edges(),
        dataset.features.m(),
        args.out.display()
    ))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String, CliError> {
    let sizes: Vec<BenchSize> = if !args.nodes.is_empty() {
        args.nodes.iter().map(|&n| BenchSize::Nodes(n)).collect()
    } else if !args.edges.is_empty() {
        args.edges.iter().map(|&e| BenchSize::Edges(e)).collect()
    } else {
        BenchConfig::default().sizes
    };
    let cfg = BenchConfig {
        sizes,
        m: args.m,
        layers: args.layers,
        k: args.k,
        avg_degree: args.avg_degree,
        seed: args.seed,
        repeats: args.repeats,
    };
    let report = with_threads(args.threads, || run_scaling(&cfg))??;
    Ok(report.render())
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Score(a) => {
            let report = cmd_score(a)?;
            Ok(format!("wrote {} scores to {}\n", report.n, a.out.display()))
        }
        Command::Eval(a) => cmd_eval(a),
        Command::Grid(a) => cmd_grid(a).map(|(_, text)| text),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
