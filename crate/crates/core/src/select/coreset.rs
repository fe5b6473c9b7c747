use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rank_by_centroid_distance, sample_cluster, SelectionConfig, Split};
use crate::cluster::Clustering;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Base,
    Sampled,
}

/// One selected record. `cluster` and `distance` are set for sampled entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreSetEntry {
    pub id: String,
    pub origin: Origin,
    pub cluster: Option<usize>,
    pub distance: Option<f64>,
}

impl CoreSetEntry {
    pub fn base(id: impl Into<String>) -> Self {
        CoreSetEntry {
            id: id.into(),
            origin: Origin::Base,
            cluster: None,
            distance: None,
        }
    }

    pub fn sampled(id: impl Into<String>, cluster: usize, distance: f64) -> Self {
        CoreSetEntry {
            id: id.into(),
            origin: Origin::Sampled,
            cluster: Some(cluster),
            distance: Some(distance),
        }
    }
}

/// Nonempty ordered selection with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreSet {
    entries: Vec<CoreSetEntry>,
}

impl CoreSet {
    pub fn new(entries: Vec<CoreSetEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyCoreSet);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::IdCollision(e.id.clone()));
            }
        }
        Ok(CoreSet { entries })
    }

    pub fn entries(&self) -> &[CoreSetEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, origin: Origin) -> usize {
        self.entries.iter().filter(|e| e.origin == origin).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub n_total: usize,
    pub n_base: usize,
    pub n_sampled: usize,
    /// Core-set size over `n_total`.
    pub fraction: f64,
    pub per_cluster_counts: Vec<usize>,
    pub config: SelectionConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub coreset: CoreSet,
    pub summary: SelectionSummary,
}

/// Base records first (split order), then each cluster's sample in cluster-id
/// order. `clustering` must cover exactly `split.remain_ids`, row for row.
pub fn build_coreset<T: Scalar>(
    split: &Split,
    clustering: &Clustering<T>,
    config: &SelectionConfig,
) -> Result<Selection> {
    config.validate()?;
    if clustering.len() != split.remain_ids.len() {
        return Err(Error::LengthMismatch {
            what: "clustering rows vs remaining records",
            left: clustering.len(),
            right: split.remain_ids.len(),
        });
    }
    if clustering.k != config.k {
        return Err(Error::InvalidConfig(format!(
            "clustering has k={} but the selection asks for k={}",
            clustering.k, config.k
        )));
    }

    let ranked = rank_by_centroid_distance(clustering);
    let samples: Vec<_> = ranked
        .par_iter()
        .enumerate()
        .map(|(c, members)| {
            sample_cluster(members, config.per_cluster, config.mode, config.seed, c)
        })
        .collect();

    let mut warnings = Vec::new();
    let mut entries: Vec<CoreSetEntry> = split.base_ids.iter().map(CoreSetEntry::base).collect();
    let mut per_cluster_counts = Vec::with_capacity(samples.len());
    for s in &samples {
        if s.zero_weight {
            warnings.push(format!(
                "cluster {}: floor(alpha*A) + floor(beta*A) = 0, nothing sampled",
                s.cluster
            ));
        } else if ranked[s.cluster].len() < config.per_cluster {
            warnings.push(format!(
                "cluster {} has {} members, fewer than A={}",
                s.cluster,
                ranked[s.cluster].len(),
                config.per_cluster
            ));
        }
        per_cluster_counts.push(s.members.len());
        entries.extend(s.members.iter().map(|m| {
            CoreSetEntry::sampled(split.remain_ids[m.index].clone(), s.cluster, m.distance)
        }));
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let n_base = split.base_ids.len();
    let n_sampled = entries.len() - n_base;
    let n_total = split.total();
    let coreset = CoreSet::new(entries)?;
    Ok(Selection {
        summary: SelectionSummary {
            n_total,
            n_base,
            n_sampled,
            fraction: coreset.len() as f64 / n_total as f64,
            per_cluster_counts,
            config: *config,
            warnings,
        },
        coreset,
    })
}
