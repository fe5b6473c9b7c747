use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rouge_l, sari, tokenize};
use crate::io::RecordSet;
use crate::{Error, Result};

/// A tokenized (source, output, references) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalInstance {
    pub source: Vec<String>,
    pub output: Vec<String>,
    pub references: Vec<Vec<String>>,
}

impl EvalInstance {
    pub fn new(
        source: Vec<String>,
        output: Vec<String>,
        references: Vec<Vec<String>>,
    ) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::InvalidConfig(
                "an evaluation instance needs a reference".into(),
            ));
        }
        let all = source
            .iter()
            .chain(&output)
            .chain(references.iter().flatten());
        if all.into_iter().any(String::is_empty) {
            return Err(Error::InvalidConfig("tokens must be nonempty".into()));
        }
        Ok(EvalInstance {
            source,
            output,
            references,
        })
    }

    pub fn from_text<'a>(
        source: &str,
        output: &str,
        references: impl IntoIterator<Item = &'a str>,
        lowercase: bool,
    ) -> Result<Self> {
        Self::new(
            tokenize(source, lowercase),
            tokenize(output, lowercase),
            references
                .into_iter()
                .map(|r| tokenize(r, lowercase))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub sari: bool,
    pub rouge_l: bool,
}

impl MetricSet {
    pub const ALL: MetricSet = MetricSet {
        sari: true,
        rouge_l: true,
    };
}

impl FromStr for MetricSet {
    type Err = Error;

    /// Comma-separated list of `sari` and `rougeL`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = MetricSet {
            sari: false,
            rouge_l: false,
        };
        for name in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name.to_ascii_lowercase().as_str() {
                "sari" => set.sari = true,
                "rougel" | "rouge_l" | "rouge-l" => set.rouge_l = true,
                _ => return Err(Error::InvalidConfig(format!("unknown metric {name:?}"))),
            }
        }
        if !set.sari && !set.rouge_l {
            return Err(Error::InvalidConfig("no metric selected".into()));
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceScore {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sari: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rouge_l: Option<f64>,
}

/// Corpus scores (means of the instance scores) plus the instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sari: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rouge_l: Option<f64>,
    pub per_instance: Vec<InstanceScore>,
}

/// Scores system outputs (keyed by record id) against every record of
/// `eval_set`. The record text is the source; its targets are the references.
pub fn score_dataset(
    outputs: &HashMap<String, String>,
    eval_set: &RecordSet,
    metrics: MetricSet,
    lowercase: bool,
) -> Result<MetricScore> {
    let missing: Vec<String> = eval_set
        .iter()
        .filter(|r| !outputs.contains_key(&r.id))
        .map(|r| r.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingOutputs(missing));
    }
    if let Some(r) = eval_set.iter().find(|r| r.targets.is_empty()) {
        return Err(Error::MissingTargets(r.id.clone()));
    }

    let per_instance: Vec<InstanceScore> = eval_set
        .records()
        .par_iter()
        .map(|r| {
            let inst = EvalInstance::from_text(
                &r.text,
                &outputs[&r.id],
                r.targets.iter().map(String::as_str),
                lowercase,
            )?;
            Ok(InstanceScore {
                id: r.id.clone(),
                sari: metrics.sari.then(|| sari(&inst)),
                rouge_l: metrics
                    .rouge_l
                    .then(|| rouge_l(&inst.output, &inst.references)),
            })
        })
        .collect::<Result<_>>()?;

    let mean = |pick: fn(&InstanceScore) -> Option<f64>| -> Option<f64> {
        let vals: Vec<f64> = per_instance.iter().filter_map(pick).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    Ok(MetricScore {
        sari: mean(|s| s.sari),
        rouge_l: mean(|s| s.rouge_l),
        per_instance,
    })
}

#[derive(Deserialize)]
struct OutputLine {
    id: String,
    output: String,
}

/// Reads system outputs, JSONL `{id, output}`.
pub fn load_outputs(path: impl AsRef<Path>) -> Result<HashMap<String, String>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut outputs = HashMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: OutputLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if outputs.insert(parsed.id.clone(), parsed.output).is_some() {
            return Err(Error::DuplicateId(parsed.id));
        }
    }
    Ok(outputs)
}
