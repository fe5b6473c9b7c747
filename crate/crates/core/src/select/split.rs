use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::SelectionRecord;
use crate::{Error, Result};

/// Base/remain partition of a record set, both sides in original record order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub base_ids: Vec<String>,
    pub remain_ids: Vec<String>,
    /// Positions of `base_ids` in the input records.
    pub base_indices: Vec<usize>,
    /// Positions of `remain_ids` in the input records.
    pub remain_indices: Vec<usize>,
}

impl Split {
    pub fn total(&self) -> usize {
        self.base_ids.len() + self.remain_ids.len()
    }

    /// Rebuilds a split from its remain side: every record not listed in
    /// `remain_ids` is base. `remain_ids` keeps its given order.
    pub fn from_remain(records: &[SelectionRecord<'_>], remain_ids: &[String]) -> Result<Self> {
        let position: HashMap<&str, usize> =
            records.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
        let mut in_remain = vec![false; records.len()];
        let mut remain_indices = Vec::with_capacity(remain_ids.len());
        for id in remain_ids {
            let &i = position.get(id.as_str()).ok_or_else(|| {
                Error::InvalidConfig(format!("clustered id {id:?} is not in the record set"))
            })?;
            if std::mem::replace(&mut in_remain[i], true) {
                return Err(Error::DuplicateId(id.clone()));
            }
            remain_indices.push(i);
        }
        let base_indices: Vec<usize> = (0..records.len()).filter(|&i| !in_remain[i]).collect();
        Ok(Split {
            base_ids: base_indices
                .iter()
                .map(|&i| records[i].id.to_owned())
                .collect(),
            remain_ids: remain_ids.to_vec(),
            base_indices,
            remain_indices,
        })
    }
}

/// Integer quotas for `fraction * sizes[i]` whose total is exactly
/// `round(fraction * sum(sizes))`. Each quota is the floor or the ceiling of its
/// exact share; leftover units go to the largest remainders, earlier entries
/// first on equal remainders.
pub fn largest_remainder(sizes: &[usize], fraction: f64) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let target = (fraction * n as f64).round() as usize;
    let shares: Vec<f64> = sizes.iter().map(|&s| fraction * s as f64).collect();
    let mut quotas: Vec<usize> = shares
        .iter()
        .zip(sizes)
        .map(|(s, &size)| (s.floor() as usize).min(size))
        .collect();
    let assigned: usize = quotas.iter().sum();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - quotas[a] as f64;
        let rb = shares[b] - quotas[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = target.saturating_sub(assigned);
    for &i in &order {
        if left == 0 {
            break;
        }
        if quotas[i] < sizes[i] {
            quotas[i] += 1;
            left -= 1;
        }
    }
    quotas
}

/// Splits records per task, drawing each task's base quota uniformly without
/// replacement.
pub fn stratified_split(
    records: &[SelectionRecord<'_>],
    base_fraction: f64,
    seed: u64,
) -> Result<Split> {
    if !(0.0..=1.0).contains(&base_fraction) {
        return Err(Error::InvalidConfig(format!(
            "base fraction {base_fraction} outside [0, 1]"
        )));
    }
    // tasks in order of first appearance
    let mut task_pos: HashMap<&str, usize> = HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let t = *task_pos.entry(r.task).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[t].push(i);
    }
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = largest_remainder(&sizes, base_fraction);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_base = vec![false; records.len()];
    for (task_members, &quota) in members.iter().zip(&quotas) {
        for pick in index::sample(&mut rng, task_members.len(), quota) {
            in_base[task_members[pick]] = true;
        }
    }

    let mut split = Split {
        base_ids: Vec::new(),
        remain_ids: Vec::new(),
        base_indices: Vec::new(),
        remain_indices: Vec::new(),
    };
    for (i, r) in records.iter().enumerate() {
        if in_base[i] {
            split.base_ids.push(r.id.to_owned());
            split.base_indices.push(i);
        } else {
            split.remain_ids.push(r.id.to_owned());
            split.remain_indices.push(i);
        }
    }
    Ok(split)
}
