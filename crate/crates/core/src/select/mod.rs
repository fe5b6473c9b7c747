//! Base split, per-cluster easy/hard sampling and core-set assembly.
//!
//! Selection only ever sees [`SelectionRecord`](crate::io::SelectionRecord)s
//! (id, task, text); reference targets never influence what is selected.

mod config;
mod coreset;
mod sample;
mod split;

pub use config::{SamplingMode, SelectionConfig};
pub use coreset::{build_coreset, CoreSet, CoreSetEntry, Origin, Selection, SelectionSummary};
pub use sample::{
    rank_by_centroid_distance, sample_cluster, window_len, ClusterSample, RankedMember,
};
pub use split::{largest_remainder, stratified_split, Split};

/// Seed for the RNG stream of one cluster.
#[inline]
pub(crate) fn cluster_seed(seed: u64, cluster: usize) -> u64 {
    seed ^ cluster as u64
}
