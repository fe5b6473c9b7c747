use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One dataset sample. `targets` are only read by the metrics; selection works
/// from [`SelectionRecord`], which does not carry them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub task: String,
    pub text: String,
    #[serde(default)]
    pub targets: Vec<String>,
}

impl Record {
    pub fn new(id: impl Into<String>, task: impl Into<String>, text: impl Into<String>) -> Self {
        Record {
            id: id.into(),
            task: task.into(),
            text: text.into(),
            targets: Vec::new(),
        }
    }

    pub fn with_targets<I, S>(mut self, targets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.targets = targets.into_iter().map(Into::into).collect();
        self
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.task.is_empty() {
            return Err(format!("record {:?} has an empty task", self.id));
        }
        if self.text.is_empty() {
            return Err(format!("record {:?} has an empty text", self.id));
        }
        Ok(())
    }
}

/// The input-only view of a record that selection is allowed to see.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionRecord<'a> {
    pub id: &'a str,
    pub task: &'a str,
    pub text: &'a str,
}

/// Ordered records with unique ids.
#[derive(Debug, Clone, Default)]
pub struct RecordSet {
    records: Vec<Record>,
    index: HashMap<String, usize>,
}

impl RecordSet {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            r.check().map_err(Error::InvalidConfig)?;
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(RecordSet { records, index })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&Record> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Record> {
        self.records.iter()
    }

    pub fn selection_inputs(&self) -> Vec<SelectionRecord<'_>> {
        self.records
            .iter()
            .map(|r| SelectionRecord {
                id: &r.id,
                task: &r.task,
                text: &r.text,
            })
            .collect()
    }
}

impl<'a> IntoIterator for &'a RecordSet {
    type Item = &'a Record;
    type IntoIter = std::slice::Iter<'a, Record>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

pub fn load_records(path: impl AsRef<Path>) -> Result<RecordSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_records(BufReader::new(file), path)
}

/// Parses JSONL records; `path` only labels errors. Blank lines are skipped.
pub fn parse_records(reader: impl BufRead, path: &Path) -> Result<RecordSet> {
    let mut records = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let record: Record = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        record.check().map_err(parse_err)?;
        if let Some(first) = seen.insert(record.id.clone(), line_no) {
            log::debug!("id {:?} first seen on line {first}", record.id);
            return Err(Error::DuplicateId(record.id));
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    RecordSet::new(records)
}
