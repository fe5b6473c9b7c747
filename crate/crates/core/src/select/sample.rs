use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{cluster_seed, SamplingMode};
use crate::cluster::Clustering;
use crate::Scalar;

/// A cluster member and its cosine distance to the cluster centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedMember {
    pub index: usize,
    pub distance: f64,
}

/// Members of every cluster ordered easy to hard: ascending distance, then
/// ascending row index.
pub fn rank_by_centroid_distance<T: Scalar>(clustering: &Clustering<T>) -> Vec<Vec<RankedMember>> {
    let mut ranked: Vec<Vec<RankedMember>> = vec![Vec::new(); clustering.k];
    for (index, (&c, &distance)) in clustering
        .assignments
        .iter()
        .zip(&clustering.distances)
        .enumerate()
    {
        ranked[c].push(RankedMember { index, distance });
    }
    for members in &mut ranked {
        members.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then(a.index.cmp(&b.index))
        });
    }
    ranked
}

/// `floor(weight * per_cluster)`. The epsilon keeps products such as
/// `0.29 * 100 = 28.999...` from losing a sample to binary rounding.
pub fn window_len(weight: f64, per_cluster: usize) -> usize {
    (weight * per_cluster as f64 + 1e-9).floor().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSample {
    pub cluster: usize,
    pub members: Vec<RankedMember>,
    /// Weighted mode asked for zero samples (`floor(alpha*A) + floor(beta*A) == 0`).
    pub zero_weight: bool,
}

/// Draws from one cluster's ranking (as produced by
/// [`rank_by_centroid_distance`]).
///
/// Weighted mode takes the easy window (the first `floor(alpha*A)` entries)
/// then the hard window (the last `floor(beta*A)` entries); where the windows
/// overlap each member is kept once, in the easy window. Uniform mode draws
/// `min(A, len)` members without replacement from the stream for
/// `seed ^ cluster`, returned in ranking order.
pub fn sample_cluster(
    ranked: &[RankedMember],
    per_cluster: usize,
    mode: SamplingMode,
    seed: u64,
    cluster: usize,
) -> ClusterSample {
    let len = ranked.len();
    match mode {
        SamplingMode::Weighted { alpha, beta } => {
            let easy = window_len(alpha, per_cluster);
            let hard = window_len(beta, per_cluster);
            let easy_end = easy.min(len);
            let hard_start = len.saturating_sub(hard).max(easy_end);
            let members = ranked[..easy_end]
                .iter()
                .chain(&ranked[hard_start..])
                .copied()
                .collect();
            ClusterSample {
                cluster,
                members,
                zero_weight: easy + hard == 0,
            }
        }
        SamplingMode::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(cluster_seed(seed, cluster));
            let mut picks = index::sample(&mut rng, len, per_cluster.min(len)).into_vec();
            picks.sort_unstable();
            ClusterSample {
                cluster,
                members: picks.into_iter().map(|i| ranked[i]).collect(),
                zero_weight: false,
            }
        }
    }
}
