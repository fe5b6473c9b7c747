use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How members are drawn from a cluster's distance ranking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    /// `floor(alpha * A)` closest members plus `floor(beta * A)` farthest.
    Weighted { alpha: f64, beta: f64 },
    /// `min(A, size)` members uniformly at random.
    UniformRandom,
}

impl SamplingMode {
    pub const HARD: SamplingMode = SamplingMode::Weighted {
        alpha: 0.0,
        beta: 1.0,
    };
    pub const EASY: SamplingMode = SamplingMode::Weighted {
        alpha: 1.0,
        beta: 0.0,
    };

    /// Short name: `hard`, `easy`, `random` or `weighted:<alpha>:<beta>`.
    pub fn label(&self) -> String {
        match *self {
            m if m == Self::HARD => "hard".into(),
            m if m == Self::EASY => "easy".into(),
            SamplingMode::UniformRandom => "random".into(),
            SamplingMode::Weighted { alpha, beta } => format!("weighted:{alpha}:{beta}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SamplingMode::Weighted { alpha, beta } = *self {
            if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
                return Err(Error::InvalidConfig(format!(
                    "alpha and beta must lie in [0, 1], got alpha={alpha}, beta={beta}"
                )));
            }
            if alpha + beta > 1.0 + 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "alpha + beta must not exceed 1, got {alpha} + {beta}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown sampling mode {s:?}"));
        let mode = match s {
            "hard" => Self::HARD,
            "easy" => Self::EASY,
            "random" | "uniform_random" => SamplingMode::UniformRandom,
            other => {
                let rest = other.strip_prefix("weighted:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                SamplingMode::Weighted {
                    alpha: a.parse().map_err(|_| bad())?,
                    beta: b.parse().map_err(|_| bad())?,
                }
            }
        };
        mode.validate()?;
        Ok(mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Share of the whole dataset placed in the stratified base split.
    pub base_fraction: f64,
    pub k: usize,
    /// Samples drawn per cluster (`A`).
    pub per_cluster: usize,
    #[serde(flatten)]
    pub mode: SamplingMode,
    pub seed: u64,
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.base_fraction) {
            return Err(Error::InvalidConfig(format!(
                "base fraction {} outside [0, 1]",
                self.base_fraction
            )));
        }
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.per_cluster < 1 && self.base_fraction < 1.0 {
            return Err(Error::InvalidConfig(
                "per-cluster sample count must be at least 1".into(),
            ));
        }
        self.mode.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for s in [
            "hard",
            "easy",
            "random",
            "weighted:0.5:0.5",
            "weighted:0.2:0.3",
        ] {
            assert_eq!(s.parse::<SamplingMode>().unwrap().label(), s);
        }
        assert!("sideways".parse::<SamplingMode>().is_err());
    }

    #[test]
    fn weights_validated() {
        assert!(SamplingMode::Weighted {
            alpha: 0.7,
            beta: 0.7
        }
        .validate()
        .is_err());
        assert!(SamplingMode::Weighted {
            alpha: -0.1,
            beta: 0.5
        }
        .validate()
        .is_err());
        assert!(SamplingMode::Weighted {
            alpha: 0.5,
            beta: 0.5
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn config_json_is_flat() {
        let c = SelectionConfig {
            base_fraction: 0.3,
            k: 7,
            per_cluster: 285,
            mode: SamplingMode::HARD,
            seed: 1,
        };
        let v = serde_json::to_value(c).unwrap();
        assert_eq!(v["mode"], "weighted");
        assert_eq!(v["beta"], 1.0);
        assert_eq!(serde_json::from_value::<SelectionConfig>(v).unwrap(), c);
    }

    #[test]
    fn config_invariants() {
        let mut c = SelectionConfig {
            base_fraction: 0.5,
            k: 3,
            per_cluster: 0,
            mode: SamplingMode::UniformRandom,
            seed: 0,
        };
        assert!(c.validate().is_err());
        c.base_fraction = 1.0;
        assert!(c.validate().is_ok());
        c.base_fraction = 1.5;
        assert!(c.validate().is_err());
    }
}
