//! Pipeline steps shared by the single-step subcommands and `sweep`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use ucs::cluster::{auto_k, kmeans, normalize_rows, silhouette_score, KMeansOptions};
use ucs::io::{coreset_to_jsonl, AlignedDataset, RecordSet};
use ucs::select::{
    build_coreset, stratified_split, SamplingMode, Selection, SelectionConfig, Split,
};
use ucs::EmbeddingClustering;

use crate::artifact::{self, ClusterArtifact};

/// Inclusive `k` range for silhouette-driven selection, written `2..12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub min: usize,
    pub max: usize,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..=")
            .or_else(|| s.split_once(".."))
            .ok_or_else(|| format!("expected MIN..MAX, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        let range = KRange {
            min: parse(a)?,
            max: parse(b)?,
        };
        if range.min < 2 || range.min > range.max {
            return Err(format!("need 2 <= MIN <= MAX, got {s:?}"));
        }
        Ok(range)
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    Auto(KRange),
}

/// Splits off the stratified base set and clusters the remaining rows.
/// Returns the artifact (its centroid path is `centroids_name`) and the
/// clustering itself.
pub fn cluster_remain(
    data: &AlignedDataset,
    base_fraction: f64,
    seed: u64,
    k: KChoice,
    opts: &KMeansOptions,
    centroids_name: String,
) -> Result<(ClusterArtifact, EmbeddingClustering)> {
    ensure!(
        (0.0..=1.0).contains(&base_fraction),
        "base fraction {base_fraction} outside [0, 1]"
    );
    let split = stratified_split(&data.records.selection_inputs(), base_fraction, seed)?;
    if split.remain_indices.is_empty() {
        bail!("base fraction {base_fraction} leaves no records to cluster");
    }
    let rows = normalize_rows(&data.embeddings.select_rows(&split.remain_indices)?)?;
    log::info!(
        "clustering {} of {} rows (d={})",
        rows.rows(),
        data.embeddings.rows(),
        rows.cols()
    );

    let (clustering, silhouette) = match k {
        KChoice::Fixed(k) => {
            let clustering = kmeans(&rows, k, seed, opts)?;
            let silhouette = if k >= 2 && rows.rows() >= 3 {
                Some(silhouette_score(&rows, &clustering.assignments)?)
            } else {
                None
            };
            (clustering, silhouette)
        }
        KChoice::Auto(range) => {
            let found = auto_k(&rows, range.min, range.max, seed, opts)?;
            let score = found
                .scores
                .iter()
                .find(|(k, _)| *k == found.k)
                .map(|&(_, s)| s);
            (found.clustering, score)
        }
    };
    let artifact = ClusterArtifact::new(
        &clustering,
        centroids_name,
        silhouette,
        base_fraction,
        split.remain_ids,
    );
    Ok((artifact, clustering))
}

/// Samples a core set from a stored clustering. The split is rebuilt from the
/// artifact's record ids, so it matches the one the clustering was run on.
pub fn select(
    records: &RecordSet,
    artifact: &ClusterArtifact,
    clustering: &EmbeddingClustering,
    per_cluster: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<Selection> {
    let split = Split::from_remain(&records.selection_inputs(), &artifact.record_ids)
        .context("clustering does not match the record file")?;
    let config = SelectionConfig {
        base_fraction: artifact.base_fraction,
        k: artifact.k,
        per_cluster,
        mode,
        seed,
    };
    Ok(build_coreset(&split, clustering, &config)?)
}

/// Core set first, summary last, so a present summary means a finished run.
pub fn write_selection(
    selection: &Selection,
    coreset_path: &Path,
    summary_path: &Path,
) -> Result<()> {
    artifact::write_bytes(coreset_path, &coreset_to_jsonl(&selection.coreset)?)?;
    artifact::write_json(summary_path, &selection.summary)
}
