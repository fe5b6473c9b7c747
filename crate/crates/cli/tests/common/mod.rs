#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use ucs::io::{write_embeddings, Record, RecordSet};
use ucs::{EmbeddingMatrix, Matrix};

pub fn ucs() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ucs"));
    cmd.env_remove("UCS_LOG");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    ucs().args(args).output().expect("spawn ucs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "ucs {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON line")
}

/// The single stderr line of a failed run, parsed.
pub fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "expected one stderr line, got {text:?}");
    serde_json::from_str(lines[0]).expect("stderr is JSON")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Records spread unevenly over `sizes.len()` tasks, each task's embeddings
/// scattered around its own random direction.
pub fn task_dataset(
    sizes: &[usize],
    d: usize,
    noise: f64,
    seed: u64,
) -> (RecordSet, EmbeddingMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let centres: Vec<Vec<f64>> = sizes
        .iter()
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| normal.sample(&mut rng)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
        .collect();

    let mut labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(t, &s)| std::iter::repeat_n(t, s))
        .collect();
    // interleave tasks so record order carries no information
    for i in (1..labels.len()).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }

    let mut records = Vec::with_capacity(labels.len());
    let mut data = Vec::with_capacity(labels.len() * d);
    for (i, &t) in labels.iter().enumerate() {
        records.push(
            Record::new(
                format!("rec-{i:06}"),
                format!("task{t}"),
                format!("instance {i} of task {t}"),
            )
            .with_targets([format!("target {i}")]),
        );
        data.extend(
            centres[t]
                .iter()
                .map(|c| (c + noise * normal.sample(&mut rng)) as f32),
        );
    }
    (
        RecordSet::new(records).unwrap(),
        Matrix::from_vec(labels.len(), d, data).unwrap(),
    )
}

pub fn write_records(path: &Path, records: &RecordSet) {
    let mut text = String::new();
    for r in records.iter() {
        text.push_str(&serde_json::to_string(r).unwrap());
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// Writes `records.jsonl` and `emb.bin` into `dir`.
pub fn write_dataset(
    dir: &Path,
    records: &RecordSet,
    embeddings: &EmbeddingMatrix,
) -> (PathBuf, PathBuf) {
    let r = dir.join("records.jsonl");
    let e = dir.join("emb.bin");
    write_records(&r, records);
    write_embeddings(&e, embeddings).unwrap();
    (r, e)
}
