//! Grid runs over base fraction x per-cluster count x sampling mode.
//!
//! Layout under `out_dir`:
//!
//! ```text
//! base-0.3/clusters.json
//! base-0.3/clusters.centroids.bin
//! base-0.3/A285-hard/coreset.jsonl
//! base-0.3/A285-hard/summary.json
//! ```
//!
//! A cell counts as done once its `summary.json` exists; reruns skip it.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::Deserialize;
use serde_json::json;
use ucs::cluster::KMeansOptions;
use ucs::io::{load_embeddings, load_records, validate_alignment, AlignedDataset};
use ucs::select::SamplingMode;
use ucs::EmbeddingClustering;

use crate::artifact::{self, ClusterArtifact};
use crate::pipeline::{self, KChoice, KRange};
use crate::SweepArgs;

/// Keys of the TOML run config. Relative paths are taken from the config
/// file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    records: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<u64>,
    k: Option<usize>,
    auto_k: Option<String>,
    base_fractions: Option<Vec<f64>>,
    per_cluster: Option<Vec<usize>>,
    modes: Option<Vec<String>>,
    max_iter: Option<usize>,
    tol: Option<f64>,
    n_init: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub records: PathBuf,
    pub embeddings: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub threads: Option<u64>,
    pub k: KChoice,
    pub base_fractions: Vec<f64>,
    pub per_cluster: Vec<usize>,
    pub modes: Vec<SamplingMode>,
    pub opts: KMeansOptions,
}

impl RunConfig {
    /// Reads the config file and applies command-line overrides.
    pub fn resolve(args: &SweepArgs) -> Result<Self> {
        let text = std::fs::read_to_string(&args.config)
            .with_context(|| format!("reading {}", args.config.display()))?;
        let file: RunConfigFile =
            toml::from_str(&text).with_context(|| format!("parsing {}", args.config.display()))?;
        let base = args.config.parent().unwrap_or(Path::new(""));
        let from_file = |p: Option<PathBuf>| p.map(|p| base.join(p));

        let k = match (args.k, args.auto_k) {
            (Some(k), _) => KChoice::Fixed(k as usize),
            (None, Some(r)) => KChoice::Auto(r),
            (None, None) => match (file.k, &file.auto_k) {
                (Some(_), Some(_)) => bail!("config sets both k and auto_k"),
                (Some(k), None) => {
                    ensure!(k >= 1, "k must be at least 1");
                    KChoice::Fixed(k)
                }
                (None, Some(r)) => KChoice::Auto(r.parse::<KRange>().map_err(anyhow::Error::msg)?),
                (None, None) => bail!("config needs k or auto_k"),
            },
        };
        let modes = match &args.modes {
            Some(m) => m.clone(),
            None => file
                .modes
                .unwrap_or_default()
                .iter()
                .map(|m| m.parse::<SamplingMode>())
                .collect::<ucs::Result<_>>()?,
        };
        let defaults = KMeansOptions::default();
        let config = RunConfig {
            records: args
                .records
                .clone()
                .or(from_file(file.records))
                .context("no records path")?,
            embeddings: args
                .embeddings
                .clone()
                .or(from_file(file.embeddings))
                .context("no embeddings path")?,
            out_dir: args
                .out_dir
                .clone()
                .or(from_file(file.out_dir))
                .context("no out_dir")?,
            seed: args.seed.or(file.seed).unwrap_or(42),
            threads: file.threads,
            k,
            base_fractions: args
                .base_fractions
                .clone()
                .or(file.base_fractions)
                .unwrap_or_default(),
            per_cluster: args
                .per_cluster
                .clone()
                .or(file.per_cluster)
                .unwrap_or_default(),
            modes,
            opts: KMeansOptions {
                max_iter: args.max_iter.or(file.max_iter).unwrap_or(defaults.max_iter),
                tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
                n_init: args
                    .n_init
                    .map(|v| v as usize)
                    .or(file.n_init)
                    .unwrap_or(defaults.n_init),
            },
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        ensure!(!self.base_fractions.is_empty(), "base_fractions is empty");
        ensure!(!self.per_cluster.is_empty(), "per_cluster is empty");
        ensure!(!self.modes.is_empty(), "modes is empty");
        for &bf in &self.base_fractions {
            ensure!(
                (0.0..1.0).contains(&bf),
                "base fraction {bf} outside [0, 1)"
            );
        }
        ensure!(
            self.per_cluster.iter().all(|&a| a >= 1),
            "per_cluster values must be at least 1"
        );
        ensure!(self.threads != Some(0), "threads must be at least 1");
        ensure!(self.opts.n_init >= 1, "n_init must be at least 1");
        let cells: HashSet<String> = self
            .base_fractions
            .iter()
            .map(|bf| bf.to_string())
            .collect();
        ensure!(
            cells.len() == self.base_fractions.len(),
            "duplicate base fraction"
        );
        let cells: HashSet<String> = self.cell_names().into_iter().collect();
        ensure!(
            cells.len() == self.per_cluster.len() * self.modes.len(),
            "duplicate per_cluster or mode entry"
        );
        for p in [&self.records, &self.embeddings] {
            ensure!(p.is_file(), "{} does not exist", p.display());
        }
        Ok(())
    }

    fn cell_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for &a in &self.per_cluster {
            for mode in &self.modes {
                names.push(cell_name(a, mode));
            }
        }
        names
    }
}

fn cell_name(per_cluster: usize, mode: &SamplingMode) -> String {
    format!("A{per_cluster}-{}", mode.label().replace(':', "_"))
}

fn base_dir(out_dir: &Path, base_fraction: f64) -> PathBuf {
    out_dir.join(format!("base-{base_fraction}"))
}

pub fn run(config: &RunConfig) -> Result<()> {
    let records = load_records(&config.records)?;
    let embeddings = load_embeddings(&config.embeddings)?;
    let data = validate_alignment(records, embeddings)?;

    let (mut written, mut skipped) = (0usize, 0usize);
    for &bf in &config.base_fractions {
        let dir = base_dir(&config.out_dir, bf);
        let pending: Vec<(usize, SamplingMode)> = config
            .per_cluster
            .iter()
            .flat_map(|&a| config.modes.iter().map(move |&m| (a, m)))
            .filter(|(a, m)| !dir.join(cell_name(*a, m)).join("summary.json").is_file())
            .collect();
        skipped += config.per_cluster.len() * config.modes.len() - pending.len();
        if pending.is_empty() {
            log::info!("{}: all cells done", dir.display());
            continue;
        }

        let (artifact, clustering) = clustering_for(config, &data, bf, &dir)?;
        for (a, mode) in pending {
            let cell = dir.join(cell_name(a, &mode));
            let selection =
                pipeline::select(&data.records, &artifact, &clustering, a, mode, config.seed)?;
            pipeline::write_selection(
                &selection,
                &cell.join("coreset.jsonl"),
                &cell.join("summary.json"),
            )?;
            log::info!(
                "{}: fraction {:.4}",
                cell.display(),
                selection.summary.fraction
            );
            written += 1;
        }
    }
    println!(
        "{}",
        json!({
            "cells": config.base_fractions.len() * config.per_cluster.len() * config.modes.len(),
            "written": written,
            "skipped": skipped,
            "out_dir": config.out_dir.display().to_string(),
        })
    );
    Ok(())
}

/// Loads the clustering of an earlier run when present, otherwise computes
/// and stores it.
fn clustering_for(
    config: &RunConfig,
    data: &AlignedDataset,
    base_fraction: f64,
    dir: &Path,
) -> Result<(ClusterArtifact, EmbeddingClustering)> {
    let path = dir.join("clusters.json");
    if path.is_file() {
        let (artifact, clustering) = artifact::load(&path)?;
        let k_matches = match config.k {
            KChoice::Fixed(k) => artifact.k == k,
            KChoice::Auto(r) => (r.min..=r.max).contains(&artifact.k),
        };
        ensure!(
            artifact.base_fraction == base_fraction && artifact.seed == config.seed && k_matches,
            "{} was produced by a different configuration; remove it or choose another out_dir",
            path.display()
        );
        log::info!("reusing {}", path.display());
        return Ok((artifact, clustering));
    }
    let (artifact, clustering) = pipeline::cluster_remain(
        data,
        base_fraction,
        config.seed,
        config.k,
        &config.opts,
        artifact::centroids_file_name(&path),
    )?;
    artifact::save(&path, &artifact, &clustering)?;
    Ok((artifact, clustering))
}
