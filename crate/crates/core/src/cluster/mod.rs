//! Spherical k-means over embedding rows and cluster diagnostics.
//!
//! Rows are compared by cosine distance `1 - u·v / (|u||v|)`. Centroids are
//! kept at unit length, so on normalized input the Euclidean and cosine
//! orderings agree and the k-means objective is the summed cosine distance.

mod distance;
mod kmeans;
mod purity;
mod silhouette;

pub use distance::{cosine_distance, normalize_rows};
pub use kmeans::{assign_to_centroids, kmeans, KMeansOptions};
pub use purity::{purity_report, ClusterPurity, PurityReport};
pub use silhouette::{auto_k, silhouette_score, AutoK};

use crate::{Matrix, Scalar};

/// Result of [`kmeans`]. Every cluster id in `0..k` has at least one member.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering<T> {
    pub k: usize,
    pub seed: u64,
    /// Cluster id of each row.
    pub assignments: Vec<usize>,
    /// `k x d`, unit-length rows.
    pub centroids: Matrix<T>,
    /// Cosine distance of each row to its own centroid.
    pub distances: Vec<f64>,
    /// Sum of `distances`.
    pub inertia: f64,
    /// Number of centroid updates performed.
    pub iterations: usize,
    /// Objective after every assignment step, oldest first; the last entry
    /// equals `inertia`.
    pub inertia_history: Vec<f64>,
}

impl<T: Scalar> Clustering<T> {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        cluster_sizes(&self.assignments, self.k)
    }

    /// Row indices belonging to cluster `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a == c)
            .map(|(i, _)| i)
            .collect()
    }
}

pub(crate) fn cluster_sizes(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    sizes
}
