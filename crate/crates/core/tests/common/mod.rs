#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use ucs::cluster::normalize_rows;
use ucs::{EmbeddingMatrix, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn cos_dist(a: &[f64], b: &[f64]) -> f64 {
    1.0 - a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// `k` unit centres with pairwise cosine distance at least `min_sep`.
pub fn centres(rng: &mut ChaCha8Rng, k: usize, d: usize, min_sep: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while out.len() < k {
        let c = unit_gaussian(rng, d);
        if out.iter().all(|o| cos_dist(o, &c) >= min_sep) {
            out.push(c);
        }
    }
    out
}

/// Rows drawn around `centres` with isotropic Gaussian noise, then
/// normalized; `labels[i]` is the generating centre of row i.
pub fn directional_mixture(
    rng: &mut ChaCha8Rng,
    centres: &[Vec<f64>],
    labels: &[usize],
    noise: f64,
) -> EmbeddingMatrix {
    let d = centres[0].len();
    let mut data = Vec::with_capacity(labels.len() * d);
    for &l in labels {
        for &c in &centres[l] {
            let e: f64 = StandardNormal.sample(rng);
            data.push((c + noise * e) as f32);
        }
    }
    normalize_rows(&Matrix::from_vec(labels.len(), d, data).unwrap()).unwrap()
}

pub fn random_unit_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix<f64> {
    let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize_rows(&Matrix::from_vec(n, d, data).unwrap()).unwrap()
}
