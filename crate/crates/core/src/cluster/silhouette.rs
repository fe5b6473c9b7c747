use rayon::prelude::*;

use super::distance::{dot, norm};
use super::{kmeans, Clustering, KMeansOptions};
use crate::{Error, Matrix, Result, Scalar};

/// Below this `max(a, b)` a sample's silhouette is taken as 0 (coincident
/// points, where `a` and `b` are pure rounding noise).
const DEGENERATE: f64 = 1e-12;

/// Mean silhouette under cosine distance.
///
/// Runs in `O(n k d)`: with unit vectors `u`, the mean distance from `u_i` to a
/// cluster `C` is `1 - u_i · (sum of C) / |C|`, so only per-cluster sums are
/// needed. Samples in singleton clusters contribute 0.
pub fn silhouette_score<T: Scalar>(data: &Matrix<T>, assignments: &[usize]) -> Result<f64> {
    let n = data.rows();
    if assignments.len() != n {
        return Err(Error::LengthMismatch {
            what: "assignments vs rows",
            left: assignments.len(),
            right: n,
        });
    }
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "silhouette needs at least 3 rows, got {n}"
        )));
    }
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    let d = data.cols();
    let mut sizes = vec![0usize; k];
    let mut sums = vec![0.0f64; k * d];
    let mut norms = Vec::with_capacity(n);
    for (i, row) in data.iter_rows().enumerate() {
        let nr = norm(row);
        if nr == 0.0 {
            return Err(Error::ZeroRow(i));
        }
        norms.push(nr);
        let c = assignments[i];
        sizes[c] += 1;
        for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(row) {
            *s += v.as_f64() / nr;
        }
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::SilhouetteUndefined);
    }

    let per_sample: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = assignments[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let row = data.row(i);
            let affinity = |c: usize| dot(row, &sums[c * d..(c + 1) * d]) / norms[i];
            let self_affinity = dot(row, row) / (norms[i] * norms[i]);
            let peers = (sizes[own] - 1) as f64;
            let a = ((peers - (affinity(own) - self_affinity)) / peers).max(0.0);
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| (1.0 - affinity(c) / sizes[c] as f64).max(0.0))
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m <= DEGENERATE {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect();
    Ok(per_sample.iter().sum::<f64>() / n as f64)
}

#[derive(Debug, Clone)]
pub struct AutoK<T> {
    pub k: usize,
    /// `(k, silhouette)` for every candidate, ascending `k`.
    pub scores: Vec<(usize, f64)>,
    /// Clustering for the selected `k`.
    pub clustering: Clustering<T>,
}

/// Picks the `k` in `k_min..=k_max` whose k-means clustering has the highest
/// silhouette; the smaller `k` wins ties.
pub fn auto_k<T: Scalar>(
    data: &Matrix<T>,
    k_min: usize,
    k_max: usize,
    seed: u64,
    opts: &KMeansOptions,
) -> Result<AutoK<T>> {
    let n = data.rows();
    if k_min < 2 || k_min > k_max || k_max + 1 > n {
        return Err(Error::InvalidConfig(format!(
            "auto-k range {k_min}..{k_max} must satisfy 2 <= min <= max <= n-1 (n={n})"
        )));
    }
    let mut scores = Vec::new();
    let mut best: Option<(f64, Clustering<T>)> = None;
    for k in k_min..=k_max {
        let clustering = kmeans(data, k, seed, opts)?;
        let score = silhouette_score(data, &clustering.assignments)?;
        log::info!("auto-k: k={k} silhouette={score:.6}");
        scores.push((k, score));
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, clustering));
        }
    }
    let (_, clustering) = best.expect("range is nonempty");
    Ok(AutoK {
        k: clustering.k,
        scores,
        clustering,
    })
}
