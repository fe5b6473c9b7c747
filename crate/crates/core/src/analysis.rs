//! Sweep analysis over per-dataset SARI / ROUGE-L scores: how often each
//! sampling mode wins, and the smallest data fraction that matches a baseline.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::metrics::MetricScore;
use crate::select::SelectionSummary;
use crate::{Error, Result};

/// Scores equal within this are the same fraction for tie-breaking.
const FRACTION_EPS: f64 = 1e-12;

/// A sweep cell: base split share, samples per cluster and sampling mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigId {
    pub base_fraction: f64,
    pub per_cluster: usize,
    pub mode: String,
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "base={}/A={}/{}",
            self.base_fraction, self.per_cluster, self.mode
        )
    }
}

impl ConfigId {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.base_fraction
            .total_cmp(&other.base_fraction)
            .then(self.per_cluster.cmp(&other.per_cluster))
            .then_with(|| mode_rank(&self.mode).cmp(&mode_rank(&other.mode)))
            .then_with(|| self.mode.cmp(&other.mode))
    }
}

/// Preference among modes when everything else ties.
fn mode_rank(mode: &str) -> u8 {
    match mode {
        "hard" => 0,
        "random" => 1,
        "easy" => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    pub sari: f64,
    pub rouge_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Sari,
    RougeL,
}

impl CellScore {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Sari => self.sari,
            Metric::RougeL => self.rouge_l,
        }
    }

    /// At least as good as `baseline` on both metrics.
    pub fn beats(&self, baseline: &CellScore) -> bool {
        self.sari >= baseline.sari && self.rouge_l >= baseline.rouge_l
    }
}

/// A config and its core-set fraction plus the scores of the model trained on
/// it, keyed by dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub config: ConfigId,
    /// Core-set size as a share of the full dataset.
    pub fraction: f64,
    pub scores: BTreeMap<String, CellScore>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    datasets: Vec<String>,
    rows: Vec<ScoreRow>,
    baseline: Option<BTreeMap<String, CellScore>>,
}

impl ScoreTable {
    /// Every row (and the baseline, if given) must score every dataset, with
    /// all scores in `[0, 100]`.
    pub fn new(
        datasets: Vec<String>,
        rows: Vec<ScoreRow>,
        baseline: Option<BTreeMap<String, CellScore>>,
    ) -> Result<Self> {
        let check = |label: &str, scores: &BTreeMap<String, CellScore>| -> Result<()> {
            for ds in &datasets {
                let cell = scores.get(ds).ok_or_else(|| Error::MissingCell {
                    config: label.to_owned(),
                    dataset: ds.clone(),
                })?;
                for (name, v) in [("sari", cell.sari), ("rouge_l", cell.rouge_l)] {
                    if !(0.0..=100.0).contains(&v) {
                        return Err(Error::ScoreRange {
                            what: format!("{label} {ds} {name}"),
                            value: v,
                        });
                    }
                }
            }
            Ok(())
        };
        if let Some(b) = &baseline {
            check("baseline", b)?;
        }
        for row in &rows {
            check(&row.config.to_string(), &row.scores)?;
        }
        Ok(ScoreTable {
            datasets,
            rows,
            baseline,
        })
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn baseline(&self) -> Option<&BTreeMap<String, CellScore>> {
        self.baseline.as_ref()
    }
}

/// Win percentages of each sampling mode within one base fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupWins {
    pub base_fraction: f64,
    /// (samples-per-cluster, dataset) pairs compared in this group.
    pub contests: usize,
    pub percentages: BTreeMap<String, f64>,
}

/// For every base fraction, the share of (per-cluster amount, dataset)
/// contests in which each mode reaches the top score. Tied modes all win.
pub fn win_percentage(table: &ScoreTable, metric: Metric) -> Result<Vec<GroupWins>> {
    let mut groups: Vec<f64> = table.rows.iter().map(|r| r.config.base_fraction).collect();
    groups.sort_by(f64::total_cmp);
    groups.dedup();

    let mut out = Vec::with_capacity(groups.len());
    for bf in groups {
        let in_group: Vec<&ScoreRow> = table
            .rows
            .iter()
            .filter(|r| r.config.base_fraction == bf)
            .collect();
        let mut wins: BTreeMap<String, usize> = in_group
            .iter()
            .map(|r| (r.config.mode.clone(), 0))
            .collect();
        if wins.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "base fraction {bf} has fewer than 2 sampling modes"
            )));
        }
        let mut amounts: Vec<usize> = in_group.iter().map(|r| r.config.per_cluster).collect();
        amounts.sort_unstable();
        amounts.dedup();

        let mut contests = 0;
        for &a in &amounts {
            let cell: Vec<&&ScoreRow> = in_group
                .iter()
                .filter(|r| r.config.per_cluster == a)
                .collect();
            for ds in &table.datasets {
                let scores =
                    cell.iter()
                        .map(|r| {
                            r.scores.get(ds).map(|c| c.get(metric)).ok_or_else(|| {
                                Error::MissingCell {
                                    config: r.config.to_string(),
                                    dataset: ds.clone(),
                                }
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                for (r, s) in cell.iter().zip(&scores) {
                    if *s == top {
                        *wins.get_mut(&r.config.mode).expect("mode registered") += 1;
                    }
                }
                contests += 1;
            }
        }
        out.push(GroupWins {
            base_fraction: bf,
            contests,
            percentages: wins
                .into_iter()
                .map(|(m, w)| (m, 100.0 * w as f64 / contests as f64))
                .collect(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatRow {
    pub config: ConfigId,
    pub fraction: f64,
    pub beats: BTreeMap<String, bool>,
    pub beat_count: usize,
}

/// Which datasets each config beats the baseline on (both metrics `>=`).
pub fn beat_matrix(table: &ScoreTable) -> Result<Vec<BeatRow>> {
    let baseline = table
        .baseline
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("score table has no baseline row".into()))?;
    Ok(table
        .rows
        .iter()
        .map(|row| {
            let beats: BTreeMap<String, bool> = table
                .datasets
                .iter()
                .map(|ds| (ds.clone(), row.scores[ds].beats(&baseline[ds])))
                .collect();
            BeatRow {
                config: row.config.clone(),
                fraction: row.fraction,
                beat_count: beats.values().filter(|&&b| b).count(),
                beats,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BestOverall {
    Found {
        config: ConfigId,
        fraction: f64,
        beat_count: usize,
        beaten: Vec<String>,
    },
    NoneQualifies {
        min_datasets: usize,
    },
}

/// The smallest-fraction config that beats the baseline on at least
/// `min_datasets` datasets. Equal fractions prefer more beaten datasets, then
/// the mode order hard, random, easy.
pub fn best_overall(table: &ScoreTable, min_datasets: usize) -> Result<BestOverall> {
    if min_datasets > table.datasets.len() {
        return Err(Error::InvalidConfig(format!(
            "min_datasets={min_datasets} exceeds the {} datasets in the table",
            table.datasets.len()
        )));
    }
    let matrix = beat_matrix(table)?;
    let best = matrix
        .into_iter()
        .filter(|r| r.beat_count >= min_datasets)
        .min_by(|a, b| {
            let fraction = if (a.fraction - b.fraction).abs() <= FRACTION_EPS {
                Ordering::Equal
            } else {
                a.fraction.total_cmp(&b.fraction)
            };
            fraction
                .then(b.beat_count.cmp(&a.beat_count))
                .then_with(|| mode_rank(&a.config.mode).cmp(&mode_rank(&b.config.mode)))
                .then_with(|| a.config.cmp_key(&b.config))
        });
    Ok(match best {
        Some(row) => BestOverall::Found {
            beaten: row
                .beats
                .iter()
                .filter(|(_, &b)| b)
                .map(|(d, _)| d.clone())
                .collect(),
            config: row.config,
            fraction: row.fraction,
            beat_count: row.beat_count,
        },
        None => BestOverall::NoneQualifies { min_datasets },
    })
}

/// Win percentages for both metrics, the beat matrix and the best config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub win_percentages: WinPercentages,
    pub best_overall: BestOverall,
    pub beat_matrix: Vec<BeatRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinPercentages {
    pub sari: Vec<GroupWins>,
    pub rouge_l: Vec<GroupWins>,
}

pub fn analyze(table: &ScoreTable, min_datasets: usize) -> Result<AnalysisReport> {
    Ok(AnalysisReport {
        win_percentages: WinPercentages {
            sari: win_percentage(table, Metric::Sari)?,
            rouge_l: win_percentage(table, Metric::RougeL)?,
        },
        best_overall: best_overall(table, min_datasets)?,
        beat_matrix: beat_matrix(table)?,
    })
}

/// The sweep cell a score file was produced for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRun {
    #[serde(flatten)]
    pub config: ConfigId,
    pub fraction: f64,
}

impl From<&SelectionSummary> for ScoredRun {
    fn from(s: &SelectionSummary) -> Self {
        ScoredRun {
            config: ConfigId {
                base_fraction: s.config.base_fraction,
                per_cluster: s.config.per_cluster,
                mode: s.config.mode.label(),
            },
            fraction: s.fraction,
        }
    }
}

/// Scores JSON as written by the scorer: corpus and instance scores, labelled
/// with the dataset and, for sweep runs, the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ScoredRun>,
    #[serde(flatten)]
    pub scores: MetricScore,
}

/// Builds a table from every `*.json` score file under `dir` (recursively)
/// and a baseline JSON mapping dataset to `{sari, rouge_l}`. Files without a
/// dataset and config label are skipped. The baseline's datasets define the
/// table's columns.
pub fn load_score_table(dir: impl AsRef<Path>, baseline: impl AsRef<Path>) -> Result<ScoreTable> {
    let baseline_path = baseline.as_ref();
    let text = std::fs::read_to_string(baseline_path).map_err(|e| Error::io(baseline_path, e))?;
    let baseline: BTreeMap<String, CellScore> = serde_json::from_str(&text)?;
    let datasets: Vec<String> = baseline.keys().cloned().collect();

    let mut files = Vec::new();
    collect_json(dir.as_ref(), &mut files)?;
    let canonical_baseline = baseline_path.canonicalize().ok();

    let mut rows: Vec<ScoreRow> = Vec::new();
    for path in files {
        if path.canonicalize().ok() == canonical_baseline {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let Ok(file) = serde_json::from_str::<ScoreFile>(&text) else {
            log::info!("skipping {}: not a score file", path.display());
            continue;
        };
        let (Some(dataset), Some(run)) = (file.dataset, file.config) else {
            log::info!("skipping {}: no dataset/config label", path.display());
            continue;
        };
        let (Some(sari), Some(rouge_l)) = (file.scores.sari, file.scores.rouge_l) else {
            return Err(Error::InvalidConfig(format!(
                "{} lacks a SARI or ROUGE-L corpus score",
                path.display()
            )));
        };
        let row = match rows.iter_mut().find(|r| r.config == run.config) {
            Some(r) => r,
            None => {
                rows.push(ScoreRow {
                    config: run.config,
                    fraction: run.fraction,
                    scores: BTreeMap::new(),
                });
                rows.last_mut().unwrap()
            }
        };
        if row
            .scores
            .insert(dataset.clone(), CellScore { sari, rouge_l })
            .is_some()
        {
            return Err(Error::InvalidConfig(format!(
                "two score files for {} on {dataset}",
                row.config
            )));
        }
    }
    rows.sort_by(|a, b| a.config.cmp_key(&b.config));
    ScoreTable::new(datasets, rows, Some(baseline))
}

fn collect_json(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_json(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DATASETS: [&str; 8] = [
        "asset", "iterator", "jfleg", "paranmt", "stsb", "turk", "wnc", "qqp",
    ];

    fn id(bf: f64, a: usize, mode: &str) -> ConfigId {
        ConfigId {
            base_fraction: bf,
            per_cluster: a,
            mode: mode.into(),
        }
    }

    fn row(config: ConfigId, fraction: f64, sari: &[f64]) -> ScoreRow {
        ScoreRow {
            config,
            fraction,
            scores: DATASETS
                .iter()
                .zip(sari)
                .map(|(d, &s)| {
                    (
                        d.to_string(),
                        CellScore {
                            sari: s,
                            rouge_l: s,
                        },
                    )
                })
                .collect(),
        }
    }

    fn table(rows: Vec<ScoreRow>, baseline: Option<f64>) -> ScoreTable {
        let baseline = baseline.map(|b| {
            DATASETS
                .iter()
                .map(|d| {
                    (
                        d.to_string(),
                        CellScore {
                            sari: b,
                            rouge_l: b,
                        },
                    )
                })
                .collect()
        });
        ScoreTable::new(
            DATASETS.iter().map(|s| s.to_string()).collect(),
            rows,
            baseline,
        )
        .unwrap()
    }

    #[test]
    fn single_winner_everywhere() {
        let t = table(
            vec![
                row(id(0.1, 285, "hard"), 0.12, &[50.0; 8]),
                row(id(0.1, 285, "easy"), 0.12, &[40.0; 8]),
                row(id(0.1, 285, "random"), 0.12, &[45.0; 8]),
            ],
            None,
        );
        let w = win_percentage(&t, Metric::Sari).unwrap();
        assert_eq!(w[0].percentages["hard"], 100.0);
        assert_eq!(w[0].percentages["easy"], 0.0);
        assert_eq!(w[0].percentages["random"], 0.0);
    }

    #[test]
    fn four_two_two_split() {
        let hard = [9.0, 9.0, 9.0, 9.0, 1.0, 1.0, 1.0, 1.0];
        let easy = [1.0, 1.0, 1.0, 1.0, 9.0, 9.0, 1.0, 1.0];
        let rand = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 9.0, 9.0];
        let t = table(
            vec![
                row(id(0.2, 285, "hard"), 0.2, &hard),
                row(id(0.2, 285, "easy"), 0.2, &easy),
                row(id(0.2, 285, "random"), 0.2, &rand),
            ],
            None,
        );
        let p = &win_percentage(&t, Metric::Sari).unwrap()[0].percentages;
        assert_eq!((p["hard"], p["easy"], p["random"]), (50.0, 25.0, 25.0));
    }

    #[test]
    fn ties_award_everyone() {
        let t = table(
            vec![
                row(id(0.3, 285, "hard"), 0.3, &[30.0; 8]),
                row(id(0.3, 285, "easy"), 0.3, &[30.0; 8]),
            ],
            None,
        );
        let p = &win_percentage(&t, Metric::RougeL).unwrap()[0].percentages;
        assert_eq!((p["hard"], p["easy"]), (100.0, 100.0));
    }

    #[test]
    fn win_percentage_needs_two_modes() {
        let t = table(vec![row(id(0.3, 285, "hard"), 0.3, &[30.0; 8])], None);
        assert!(win_percentage(&t, Metric::Sari).is_err());
    }

    #[test]
    fn equal_fraction_prefers_more_beats() {
        let seven = [60.0, 60.0, 60.0, 60.0, 60.0, 60.0, 60.0, 10.0];
        let six = [60.0, 60.0, 60.0, 60.0, 60.0, 60.0, 10.0, 10.0];
        let t = table(
            vec![
                row(id(0.3, 285, "hard"), 0.325, &six),
                row(id(0.3, 285, "easy"), 0.325, &seven),
            ],
            Some(50.0),
        );
        match best_overall(&t, 6).unwrap() {
            BestOverall::Found {
                config, beat_count, ..
            } => {
                assert_eq!(config.mode, "easy");
                assert_eq!(beat_count, 7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nobody_qualifies() {
        let t = table(
            vec![row(id(0.3, 285, "hard"), 0.325, &[10.0; 8])],
            Some(50.0),
        );
        assert_eq!(
            best_overall(&t, 6).unwrap(),
            BestOverall::NoneQualifies { min_datasets: 6 }
        );
    }

    #[test]
    fn beats_need_both_metrics() {
        let mut r = row(id(0.3, 285, "hard"), 0.325, &[60.0; 8]);
        r.scores.get_mut("wnc").unwrap().rouge_l = 10.0;
        let t = table(vec![r], Some(50.0));
        assert_eq!(beat_matrix(&t).unwrap()[0].beat_count, 7);
    }

    #[test]
    fn table_validation() {
        let mut r = row(id(0.3, 285, "hard"), 0.325, &[60.0; 8]);
        r.scores.remove("jfleg");
        let err = ScoreTable::new(
            DATASETS.iter().map(|s| s.to_string()).collect(),
            vec![r],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingCell { dataset, .. } if dataset == "jfleg"));

        let r = row(id(0.3, 285, "hard"), 0.325, &[160.0; 8]);
        assert!(ScoreTable::new(
            DATASETS.iter().map(|s| s.to_string()).collect(),
            vec![r],
            None
        )
        .is_err());
    }
}
