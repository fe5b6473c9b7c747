//! Single-step subcommands. Each writes its outputs, then prints a one-line
//! JSON summary on stdout.

use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde_json::json;
use ucs::analysis::{
    analyze as analyze_table, load_score_table, BestOverall, ScoreFile, ScoredRun,
};
use ucs::cluster::{KMeansOptions, PurityReport};
use ucs::io::{load_embeddings, load_records, validate_alignment};
use ucs::metrics::{load_outputs, score_dataset};
use ucs::select::{SamplingMode, SelectionSummary};

use crate::artifact::{self, write_json};
use crate::pipeline::{self, KChoice};
use crate::{AnalyzeArgs, ClusterArgs, PurityArgs, ScoreArgs, SelectArgs};

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let embeddings = load_embeddings(&args.embeddings)?;
    let data = validate_alignment(records, embeddings)?;
    let k = match (args.k, args.auto_k) {
        (Some(k), _) => KChoice::Fixed(k as usize),
        (None, Some(range)) => KChoice::Auto(range),
        (None, None) => unreachable!("clap requires one of --k / --auto-k"),
    };
    let opts = KMeansOptions {
        max_iter: args.max_iter,
        tol: args.tol,
        n_init: args.n_init as usize,
    };
    let (artifact, clustering) = pipeline::cluster_remain(
        &data,
        args.base_fraction,
        args.seed,
        k,
        &opts,
        artifact::centroids_file_name(&args.out),
    )?;
    artifact::save(&args.out, &artifact, &clustering)?;
    println!(
        "{}",
        json!({
            "k": artifact.k,
            "inertia": artifact.inertia,
            "silhouette": artifact.silhouette,
            "iterations": artifact.iterations,
        })
    );
    Ok(())
}

pub fn select(args: &SelectArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let (artifact, clustering) = artifact::load(&args.clusters)?;
    if let Some(bf) = args.base_fraction {
        ensure!(
            (bf - artifact.base_fraction).abs() <= 1e-12,
            "--base-fraction {bf} differs from the {} the clustering was built with",
            artifact.base_fraction
        );
    }
    let mode = match (args.mode, args.alpha, args.beta) {
        (Some(mode), _, _) => mode,
        (None, Some(alpha), Some(beta)) => SamplingMode::Weighted { alpha, beta },
        _ => unreachable!("clap requires --mode or both --alpha and --beta"),
    };
    mode.validate()?;
    let selection = pipeline::select(
        &records,
        &artifact,
        &clustering,
        args.per_cluster as usize,
        mode,
        args.seed,
    )?;
    let summary_path = match &args.summary {
        Some(p) => p.clone(),
        None => args.out.with_file_name("summary.json"),
    };
    pipeline::write_selection(&selection, &args.out, &summary_path)?;
    let s = &selection.summary;
    println!(
        "{}",
        json!({
            "n_total": s.n_total,
            "n_base": s.n_base,
            "n_sampled": s.n_sampled,
            "fraction": s.fraction,
        })
    );
    Ok(())
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let outputs = load_outputs(&args.system)?;
    let eval = load_records(&args.eval)?;
    let scores = score_dataset(&outputs, &eval, args.metrics, !args.no_lowercase)?;
    let dataset = match &args.dataset {
        Some(d) => d.clone(),
        None => file_stem(&args.eval)?,
    };
    let config = match &args.selection {
        Some(path) => {
            let summary: SelectionSummary = read_json(path)?;
            Some(ScoredRun::from(&summary))
        }
        None => None,
    };
    let file = ScoreFile {
        dataset: Some(dataset.clone()),
        config,
        scores,
    };
    write_json(&args.out, &file)?;
    println!(
        "{}",
        json!({
            "dataset": dataset,
            "n": file.scores.per_instance.len(),
            "sari": file.scores.sari,
            "rouge_l": file.scores.rouge_l,
        })
    );
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let table = load_score_table(&args.scores, &args.baseline)?;
    let report = analyze_table(&table, args.min_datasets)?;
    write_json(&args.out, &report)?;
    let best = match &report.best_overall {
        BestOverall::Found {
            config,
            fraction,
            beat_count,
            ..
        } => {
            json!({ "config": config.to_string(), "fraction": fraction, "beat_count": beat_count })
        }
        BestOverall::NoneQualifies { .. } => serde_json::Value::Null,
    };
    println!(
        "{}",
        json!({ "configs": table.rows().len(), "datasets": table.datasets().len(), "best_overall": best })
    );
    Ok(())
}

pub fn purity(args: &PurityArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let (artifact, _) = artifact::load(&args.clusters)?;
    let tasks = artifact
        .record_ids
        .iter()
        .map(|id| {
            records.get(id).map(|r| r.task.as_str()).with_context(|| {
                format!("clustered id {id:?} is not in {}", args.records.display())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = PurityReport::from_assignments(&artifact.assignments, artifact.k, &tasks)?;
    write_json(&args.out, &report)?;
    println!(
        "{}",
        json!({ "n": report.n, "k": artifact.k, "overall": report.overall })
    );
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn file_stem(path: &Path) -> Result<String> {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .with_context(|| format!("{} has no file name", path.display()))
}
