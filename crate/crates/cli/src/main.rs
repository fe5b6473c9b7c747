//! `ucs`: cluster embeddings, sample core sets, score system outputs and
//! analyse sweeps.

mod artifact;
mod commands;
mod pipeline;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use ucs::metrics::MetricSet;
use ucs::select::SamplingMode;

use crate::pipeline::KRange;

#[derive(Debug, Parser)]
#[command(
    name = "ucs",
    version,
    about = "Core-set selection by clustering instruction embeddings"
)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split off the base set and cluster the remaining embeddings.
    Cluster(ClusterArgs),
    /// Sample a core set from a clustering.
    Select(SelectArgs),
    /// Score system outputs with SARI and ROUGE-L.
    Score(ScoreArgs),
    /// Run every cell of a base-fraction x per-cluster x mode grid.
    Sweep(SweepArgs),
    /// Win percentages and the smallest fraction that beats the baseline.
    Analyze(AnalyzeArgs),
    /// Task purity of each cluster.
    Purity(PurityArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("k_choice").required(true).args(["k", "auto_k"])))]
struct ClusterArgs {
    /// Embedding matrix, UCSEMB01 or NPY.
    #[arg(long)]
    embeddings: PathBuf,
    /// Records JSONL, one line per embedding row.
    #[arg(long)]
    records: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    /// Pick k by silhouette from an inclusive range, e.g. `2..12`.
    #[arg(long)]
    auto_k: Option<KRange>,
    /// Share of records held out as the stratified base set before clustering.
    #[arg(long, default_value_t = 0.0)]
    base_fraction: f64,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// k-means restarts; the lowest-inertia run is kept.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    n_init: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "clusters.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("sampling").required(true).multiple(true).args(["mode", "alpha", "beta"])))]
struct SelectArgs {
    #[arg(long)]
    records: PathBuf,
    /// Clustering written by `cluster`.
    #[arg(long, default_value = "clusters.json")]
    clusters: PathBuf,
    /// Must equal the base fraction the clustering was built with.
    #[arg(long)]
    base_fraction: Option<f64>,
    /// Samples per cluster (A).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    per_cluster: u64,
    /// `hard`, `easy`, `random` or `weighted:ALPHA:BETA`.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    mode: Option<SamplingMode>,
    /// Share of A taken from the cluster centre.
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    /// Share of A taken from the cluster edge.
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "coreset.jsonl")]
    out: PathBuf,
    /// Summary JSON; defaults to `summary.json` next to the core set.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// System outputs, JSONL `{id, output}`.
    #[arg(long)]
    system: PathBuf,
    /// Evaluation records; `text` is the source and `targets` the references.
    #[arg(long)]
    eval: PathBuf,
    #[arg(long, default_value = "sari,rougeL")]
    metrics: MetricSet,
    /// Compare tokens case-sensitively.
    #[arg(long)]
    no_lowercase: bool,
    /// Dataset label; defaults to the eval file stem.
    #[arg(long)]
    dataset: Option<String>,
    /// Selection summary of the training run, recorded as its config label.
    #[arg(long)]
    selection: Option<PathBuf>,
    #[arg(long, default_value = "scores.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("k_choice").args(["k", "auto_k"])))]
struct SweepArgs {
    /// TOML run config; the flags below override its keys.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    #[arg(long)]
    auto_k: Option<KRange>,
    #[arg(long, value_delimiter = ',')]
    base_fractions: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    per_cluster: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<SamplingMode>>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_init: Option<u64>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Directory searched recursively for score JSON files.
    #[arg(long)]
    scores: PathBuf,
    /// JSON mapping dataset to `{sari, rouge_l}` of the full-data model.
    #[arg(long)]
    baseline: PathBuf,
    #[arg(long, default_value_t = 6)]
    min_datasets: usize,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PurityArgs {
    #[arg(long, default_value = "clusters.json")]
    clusters: PathBuf,
    #[arg(long)]
    records: PathBuf,
    #[arg(long, default_value = "purity.json")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("UCS_LOG", "error")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            report_error("usage", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error("failure", &format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": message, "kind": kind });
    eprintln!("{line}");
}

fn run(cli: Cli) -> Result<()> {
    let (threads, command) = match cli.command {
        Command::Sweep(args) => {
            let config = sweep::RunConfig::resolve(&args)?;
            let threads = cli.threads.or(config.threads);
            (threads, Job::Sweep(config))
        }
        other => (cli.threads, Job::Single(other)),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.map_or(0, |t| t as usize))
        .build()
        .context("starting worker threads")?;
    pool.install(|| match command {
        Job::Sweep(config) => sweep::run(&config),
        Job::Single(Command::Cluster(a)) => commands::cluster(&a),
        Job::Single(Command::Select(a)) => commands::select(&a),
        Job::Single(Command::Score(a)) => commands::score(&a),
        Job::Single(Command::Analyze(a)) => commands::analyze(&a),
        Job::Single(Command::Purity(a)) => commands::purity(&a),
        Job::Single(Command::Sweep(_)) => unreachable!("handled above"),
    })
}

enum Job {
    Sweep(sweep::RunConfig),
    Single(Command),
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn k_must_be_positive_and_exclusive() {
        let base = ["ucs", "cluster", "--embeddings", "e", "--records", "r"];
        let parse = |extra: &[&str]| Cli::try_parse_from(base.iter().chain(extra));
        assert!(parse(&["--k", "7"]).is_ok());
        assert!(parse(&["--auto-k", "2..12"]).is_ok());
        assert!(parse(&["--k", "0"]).is_err());
        assert!(parse(&[]).is_err());
        assert!(parse(&["--k", "3", "--auto-k", "2..4"]).is_err());
    }

    #[test]
    fn sampling_flags() {
        let base = ["ucs", "select", "--records", "r", "--per-cluster", "285"];
        let parse = |extra: &[&str]| Cli::try_parse_from(base.iter().chain(extra));
        assert!(parse(&["--mode", "easy"]).is_ok());
        assert!(parse(&["--alpha", "1", "--beta", "0"]).is_ok());
        assert!(parse(&[]).is_err());
        assert!(parse(&["--alpha", "1"]).is_err());
        assert!(parse(&["--mode", "hard", "--alpha", "0", "--beta", "1"]).is_err());
        assert!(parse(&["--mode", "sideways"]).is_err());
    }
}
