//! The clustering artifact: `clusters.json` plus a UCSEMB01 centroid file.

use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use serde::{Deserialize, Serialize};
use ucs::cluster::Clustering;
use ucs::io::{encode_native, load_embeddings, write_atomic};
use ucs::EmbeddingClustering;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterArtifact {
    pub k: usize,
    pub seed: u64,
    pub iterations: usize,
    pub inertia: f64,
    pub assignments: Vec<usize>,
    pub distances: Vec<f64>,
    /// Resolved against the directory holding the JSON file when relative.
    pub centroids_path: String,
    pub silhouette: Option<f64>,
    /// Base split share used before clustering; `record_ids` lists the
    /// remaining records in row order.
    pub base_fraction: f64,
    pub record_ids: Vec<String>,
}

impl ClusterArtifact {
    pub fn new(
        clustering: &EmbeddingClustering,
        centroids_path: String,
        silhouette: Option<f64>,
        base_fraction: f64,
        record_ids: Vec<String>,
    ) -> Self {
        ClusterArtifact {
            k: clustering.k,
            seed: clustering.seed,
            iterations: clustering.iterations,
            inertia: clustering.inertia,
            assignments: clustering.assignments.clone(),
            distances: clustering.distances.clone(),
            centroids_path,
            silhouette,
            base_fraction,
            record_ids,
        }
    }
}

/// `clusters.json` -> `clusters.centroids.bin`, next to it.
pub fn centroids_file_name(json_path: &Path) -> String {
    let stem = json_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "clusters".into());
    format!("{stem}.centroids.bin")
}

pub fn save(
    json_path: &Path,
    artifact: &ClusterArtifact,
    clustering: &EmbeddingClustering,
) -> Result<()> {
    let centroids = resolve(json_path, &artifact.centroids_path);
    write_bytes(&centroids, &encode_native(&clustering.centroids))?;
    write_json(json_path, artifact)
}

pub fn load(json_path: &Path) -> Result<(ClusterArtifact, EmbeddingClustering)> {
    let text = std::fs::read_to_string(json_path)
        .with_context(|| format!("reading {}", json_path.display()))?;
    let artifact: ClusterArtifact =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", json_path.display()))?;
    let centroids = load_embeddings(resolve(json_path, &artifact.centroids_path))?;

    let n = artifact.assignments.len();
    ensure!(
        artifact.distances.len() == n && artifact.record_ids.len() == n,
        "{}: assignments, distances and record_ids differ in length",
        json_path.display()
    );
    ensure!(
        centroids.rows() == artifact.k,
        "{}: centroid file has {} rows for k={}",
        json_path.display(),
        centroids.rows(),
        artifact.k
    );
    ensure!(
        artifact.assignments.iter().all(|&a| a < artifact.k),
        "{}: cluster id out of range",
        json_path.display()
    );
    let clustering = Clustering {
        k: artifact.k,
        seed: artifact.seed,
        assignments: artifact.assignments.clone(),
        centroids,
        distances: artifact.distances.clone(),
        inertia: artifact.inertia,
        iterations: artifact.iterations,
        inertia_history: Vec::new(),
    };
    Ok((artifact, clustering))
}

fn resolve(json_path: &Path, target: &str) -> PathBuf {
    let target = Path::new(target);
    if target.is_absolute() {
        return target.to_path_buf();
    }
    json_path.parent().unwrap_or(Path::new("")).join(target)
}

/// Pretty JSON with a trailing newline, written atomically; parent
/// directories are created as needed.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    write_atomic(path, bytes)?;
    Ok(())
}
