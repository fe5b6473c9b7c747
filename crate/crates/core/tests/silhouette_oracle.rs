mod common;

use common::*;
use rand::Rng;
use ucs::cluster::{auto_k, kmeans, silhouette_score, KMeansOptions};
use ucs::Matrix;

/// Direct O(n^2) silhouette: pairwise cosine distances, no algebraic shortcut.
fn brute_force(data: &Matrix<f64>, labels: &[usize]) -> f64 {
    let n = data.rows();
    let dist = |i: usize, j: usize| {
        let (a, b) = (data.row(i), data.row(j));
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        (1.0 - dot / (na * nb)).clamp(0.0, 2.0)
    };
    let k = labels.iter().max().unwrap() + 1;
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += dist(i, j);
                counts[labels[j]] += 1;
            }
        }
        let own = labels[i];
        if counts[own] == 0 {
            continue;
        }
        let a = sums[own] / counts[own] as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / n as f64
}

#[test]
fn matches_brute_force_on_random_labels() {
    let mut r = rng(10);
    for _ in 0..25 {
        let n = r.random_range(3..=300);
        let d = r.random_range(2..20);
        let k = r.random_range(2..=6.min(n));
        let data = random_unit_rows(&mut r, n, d);
        let mut labels: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let fast = silhouette_score(&data, &labels).unwrap();
        let slow = brute_force(&data, &labels);
        assert!((fast - slow).abs() <= 1e-9, "n={n}: {fast} vs {slow}");
    }
}

#[test]
fn matches_brute_force_on_random_200_by_16() {
    let mut r = rng(11);
    let data = random_unit_rows(&mut r, 200, 16);
    let c = kmeans(&data, 4, 2, &KMeansOptions::default()).unwrap();
    let fast = silhouette_score(&data, &c.assignments).unwrap();
    assert!((fast - brute_force(&data, &c.assignments)).abs() <= 1e-9);
    assert!((-1.0..=1.0).contains(&fast));
}

#[test]
fn brute_force_agrees_on_fixed_cases() {
    let m = Matrix::from_rows(&[[1.0f64, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]).unwrap();
    assert!((brute_force(&m, &[0, 0, 1, 1]) - 1.0).abs() < 1e-12);
    let same = Matrix::from_rows(&[[0.6f64, 0.8]; 4]).unwrap();
    assert!(brute_force(&same, &[0, 1, 0, 1]) <= 0.0);
    assert!(silhouette_score(&same, &[0, 1, 0, 1]).unwrap() <= 0.0);
}

#[test]
fn auto_k_finds_three_blobs() {
    let mut r = rng(12);
    let centres = centres(&mut r, 3, 24, 0.5);
    let labels: Vec<usize> = (0..600).map(|i| i % 3).collect();
    // noise 0.015 per dimension keeps rows within ~0.003 cosine of their centre
    let data = directional_mixture(&mut r, &centres, &labels, 0.015);
    let picked = auto_k(&data, 2, 6, 7, &KMeansOptions::default()).unwrap();
    assert_eq!(picked.k, 3, "{:?}", picked.scores);
    assert_eq!(picked.scores.len(), 5);
    let best = picked
        .scores
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(picked.scores[1].1, best);
}

#[test]
fn auto_k_ties_go_to_smaller_k() {
    // every candidate scores exactly 0 on coincident rows
    let data = Matrix::from_rows(&[[0.0f64, 1.0]; 8]).unwrap();
    let picked = auto_k(&data, 2, 4, 1, &KMeansOptions::default()).unwrap();
    assert!(
        picked.scores.iter().all(|s| s.1 == 0.0),
        "{:?}",
        picked.scores
    );
    assert_eq!(picked.k, 2);
}
