use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::distance::{cosine_with_norms, norm};
use super::{cluster_sizes, Clustering};
use crate::{Error, Matrix, Result, Scalar};

/// Rows per partial sum in the centroid update. Partials are combined in chunk
/// order, so the result does not depend on how rayon schedules the chunks.
const REDUCE_CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves further than this (Euclidean).
    pub tol: f64,
    /// Independent seedings; the run with the lowest inertia is kept.
    pub n_init: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            max_iter: 300,
            tol: 1e-6,
            n_init: 10,
        }
    }
}

/// Spherical k-means with greedy k-means++ seeding, restarted `opts.n_init`
/// times.
///
/// Expects L2-normalized rows; every row must at least be nonzero. The result
/// is a pure function of `(data, k, seed, opts)` and does not depend on the
/// size of the rayon pool it runs in.
pub fn kmeans<T: Scalar>(
    data: &Matrix<T>,
    k: usize,
    seed: u64,
    opts: &KMeansOptions,
) -> Result<Clustering<T>> {
    let n = data.rows();
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if opts.n_init < 1 {
        return Err(Error::InvalidConfig("n_init must be at least 1".into()));
    }
    let row_norms = row_norms(data)?;
    let mut best: Option<Clustering<T>> = None;
    for run in 0..opts.n_init {
        // run r draws from stream r of the seed's generator
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let candidate = lloyd(data, &row_norms, k, seed, opts, &mut rng);
        log::debug!(
            "kmeans k={k} run={run} inertia={:.9} iterations={}",
            candidate.inertia,
            candidate.iterations
        );
        if best.as_ref().is_none_or(|b| candidate.inertia < b.inertia) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

fn lloyd<T: Scalar>(
    data: &Matrix<T>,
    row_norms: &[f64],
    k: usize,
    seed: u64,
    opts: &KMeansOptions,
    rng: &mut ChaCha8Rng,
) -> Clustering<T> {
    let mut centroids = plus_plus(data, row_norms, k, rng);

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    // repairs are rare; this only bounds a pathological repair cycle
    let hard_cap = opts.max_iter + k + 1;
    loop {
        let (mut assignments, mut distances) = assign_with_norms(data, row_norms, &centroids);
        let repaired = repair_empty(
            data,
            row_norms,
            &mut centroids,
            &mut assignments,
            &mut distances,
        );
        let inertia: f64 = distances.iter().sum();
        history.push(inertia);
        log::trace!("kmeans k={k} iter={iterations} inertia={inertia:.9} repaired={repaired}");

        let done =
            (!repaired && (converged || iterations >= opts.max_iter)) || iterations >= hard_cap;
        if done {
            return Clustering {
                k,
                seed,
                assignments,
                centroids,
                distances,
                inertia,
                iterations,
                inertia_history: history,
            };
        }

        let updated = update_centroids(data, row_norms, &assignments, &centroids);
        let shift = max_shift(&centroids, &updated);
        centroids = updated;
        iterations += 1;
        converged = shift < opts.tol;
    }
}

/// Nearest centroid of every row (lowest index wins ties) and the cosine
/// distance to it.
pub fn assign_to_centroids<T: Scalar>(
    data: &Matrix<T>,
    centroids: &Matrix<T>,
) -> Result<(Vec<usize>, Vec<f64>)> {
    if data.cols() != centroids.cols() {
        return Err(Error::DimensionMismatch(data.cols(), centroids.cols()));
    }
    let row_norms = row_norms(data)?;
    Ok(assign_with_norms(data, &row_norms, centroids))
}

fn row_norms<T: Scalar>(data: &Matrix<T>) -> Result<Vec<f64>> {
    let norms: Vec<f64> = data.iter_rows().map(norm).collect();
    match norms.iter().position(|&v| v == 0.0) {
        Some(i) => Err(Error::ZeroRow(i)),
        None => Ok(norms),
    }
}

fn assign_with_norms<T: Scalar>(
    data: &Matrix<T>,
    row_norms: &[f64],
    centroids: &Matrix<T>,
) -> (Vec<usize>, Vec<f64>) {
    let centroid_norms: Vec<f64> = centroids.iter_rows().map(norm).collect();
    (0..data.rows())
        .into_par_iter()
        .map(|i| {
            let row = data.row(i);
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter_rows().enumerate() {
                let d = cosine_with_norms(row, row_norms[i], centroid, centroid_norms[c]);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

fn unit_row<T: Scalar>(row: &[T], row_norm: f64) -> impl Iterator<Item = T> + '_ {
    row.iter()
        .map(move |v| T::from_f64_lossy(v.as_f64() / row_norm))
}

fn plus_plus<T: Scalar>(
    data: &Matrix<T>,
    row_norms: &[f64],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Matrix<T> {
    let n = data.rows();
    let d = data.cols();
    let mut chosen = vec![false; n];
    let mut centroid_data: Vec<T> = Vec::with_capacity(k * d);

    let first = rng.random_range(0..n);
    chosen[first] = true;
    centroid_data.extend(unit_row(data.row(first), row_norms[first]));

    // weight = cosine distance to the nearest chosen centre, proportional to
    // the squared Euclidean distance on the unit sphere
    let distances_to = |row: usize| -> Vec<f64> {
        let centre = data.row(row);
        (0..n)
            .into_par_iter()
            .map(|i| cosine_with_norms(data.row(i), row_norms[i], centre, row_norms[row]))
            .collect()
    };
    let mut nearest = distances_to(first);
    let trials = 2 + (k as f64).ln().floor() as usize;
    for _ in 1..k {
        // greedy variant: draw several candidates, keep the one leaving the
        // smallest total weight
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for _ in 0..trials {
            let Some(candidate) = draw(&nearest, rng) else {
                break;
            };
            let merged: Vec<f64> = distances_to(candidate)
                .into_iter()
                .zip(&nearest)
                .map(|(a, &b)| a.min(b))
                .collect();
            let potential: f64 = merged.iter().sum();
            if best.as_ref().is_none_or(|(p, _, _)| potential < *p) {
                best = Some((potential, candidate, merged));
            }
        }
        let pick = match best {
            Some((_, candidate, merged)) => {
                nearest = merged;
                candidate
            }
            // all rows coincide with a centre: take the first unused row
            None => chosen.iter().position(|&c| !c).unwrap_or(0),
        };
        chosen[pick] = true;
        centroid_data.extend(unit_row(data.row(pick), row_norms[pick]));
    }
    Matrix::from_parts_unchecked(k, d, centroid_data)
}

/// Index drawn with probability proportional to `weights`; `None` when all
/// weights are zero.
fn draw(weights: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        pick = Some(i);
        if acc > target {
            break;
        }
    }
    pick
}

/// Moves the farthest reassignable point into each empty cluster, making it
/// that cluster's centroid. Returns whether anything moved.
fn repair_empty<T: Scalar>(
    data: &Matrix<T>,
    row_norms: &[f64],
    centroids: &mut Matrix<T>,
    assignments: &mut [usize],
    distances: &mut [f64],
) -> bool {
    let k = centroids.rows();
    let mut sizes = cluster_sizes(assignments, k);
    let mut repaired = false;
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut donor: Option<usize> = None;
        for i in 0..assignments.len() {
            if sizes[assignments[i]] > 1 && donor.is_none_or(|j| distances[i] > distances[j]) {
                donor = Some(i);
            }
        }
        // k <= n guarantees a donor exists
        let Some(p) = donor else { break };
        sizes[assignments[p]] -= 1;
        sizes[empty] += 1;
        assignments[p] = empty;

        for (slot, v) in centroids
            .row_mut(empty)
            .iter_mut()
            .zip(unit_row(data.row(p), row_norms[p]))
        {
            *slot = v;
        }
        let c = centroids.row(empty);
        distances[p] = cosine_with_norms(data.row(p), row_norms[p], c, norm(c));
        repaired = true;
    }
    repaired
}

fn update_centroids<T: Scalar>(
    data: &Matrix<T>,
    row_norms: &[f64],
    assignments: &[usize],
    previous: &Matrix<T>,
) -> Matrix<T> {
    let k = previous.rows();
    let d = data.cols();
    let n = data.rows();
    let chunks = n.div_ceil(REDUCE_CHUNK);

    let partials: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sums = vec![0.0f64; k * d];
            let end = ((chunk + 1) * REDUCE_CHUNK).min(n);
            for i in chunk * REDUCE_CHUNK..end {
                let c = assignments[i];
                let inv = 1.0 / row_norms[i];
                for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(data.row(i)) {
                    *s += v.as_f64() * inv;
                }
            }
            sums
        })
        .collect();

    let mut sums = vec![0.0f64; k * d];
    for partial in &partials {
        for (s, p) in sums.iter_mut().zip(partial) {
            *s += p;
        }
    }

    let mut out = Vec::with_capacity(k * d);
    for c in 0..k {
        let mean = &sums[c * d..(c + 1) * d];
        let len = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 0.0 {
            out.extend(mean.iter().map(|v| T::from_f64_lossy(v / len)));
        } else {
            // members cancel out exactly; keep the old direction
            out.extend_from_slice(previous.row(c));
        }
    }
    Matrix::from_parts_unchecked(k, d, out)
}

fn max_shift<T: Scalar>(old: &Matrix<T>, new: &Matrix<T>) -> f64 {
    old.iter_rows()
        .zip(new.iter_rows())
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x.as_f64() - y.as_f64()).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
