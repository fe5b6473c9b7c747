use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Clustering;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPurity {
    pub cluster: usize,
    pub size: usize,
    pub task_counts: BTreeMap<String, usize>,
    /// Most frequent task; alphabetical order breaks ties. `None` when empty.
    pub majority_task: Option<String>,
    pub purity: f64,
}

/// How well clusters line up with task labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub n: usize,
    pub clusters: Vec<ClusterPurity>,
    /// Sum of majority counts over `n`.
    pub overall: f64,
}

impl PurityReport {
    pub fn from_assignments<S: AsRef<str>>(
        assignments: &[usize],
        k: usize,
        tasks: &[S],
    ) -> Result<Self> {
        if assignments.len() != tasks.len() {
            return Err(Error::LengthMismatch {
                what: "assignments vs records",
                left: assignments.len(),
                right: tasks.len(),
            });
        }
        let k = k.max(assignments.iter().max().map_or(0, |m| m + 1));
        let mut counts: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); k];
        for (&a, task) in assignments.iter().zip(tasks) {
            *counts[a].entry(task.as_ref().to_owned()).or_default() += 1;
        }
        let mut majority_total = 0;
        let clusters = counts
            .into_iter()
            .enumerate()
            .map(|(cluster, task_counts)| {
                let size: usize = task_counts.values().sum();
                let mut majority: Option<(&String, usize)> = None;
                for (task, &c) in &task_counts {
                    if majority.is_none_or(|(_, best)| c > best) {
                        majority = Some((task, c));
                    }
                }
                let top = majority.map_or(0, |(_, c)| c);
                majority_total += top;
                ClusterPurity {
                    cluster,
                    size,
                    majority_task: majority.map(|(t, _)| t.clone()),
                    purity: if size == 0 {
                        0.0
                    } else {
                        top as f64 / size as f64
                    },
                    task_counts,
                }
            })
            .collect();
        let n = assignments.len();
        Ok(PurityReport {
            n,
            clusters,
            overall: if n == 0 {
                0.0
            } else {
                majority_total as f64 / n as f64
            },
        })
    }
}

/// Purity of `clustering` against the task label of each clustered row.
pub fn purity_report<T: Scalar, S: AsRef<str>>(
    clustering: &Clustering<T>,
    tasks: &[S],
) -> Result<PurityReport> {
    PurityReport::from_assignments(&clustering.assignments, clustering.k, tasks)
}
