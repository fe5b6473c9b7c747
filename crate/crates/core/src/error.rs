use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("{0}: file contains no records")]
    EmptyFile(PathBuf),
    #[error("embedding format error: {0}")]
    Format(String),
    #[error("truncated embedding payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("non-finite embedding value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("record/embedding count mismatch: {records} vs {rows}")]
    CountMismatch { records: usize, rows: usize },
    #[error("row {0} has zero norm")]
    ZeroRow(usize),
    #[error("cosine distance undefined for a zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid cluster count k={k} for n={n}")]
    InvalidK { k: usize, n: usize },
    #[error("silhouette undefined for K=1")]
    SilhouetteUndefined,
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("a core-set of size 0 is invalid")]
    EmptyCoreSet,
    #[error("record id {0:?} appears twice in the core-set")]
    IdCollision(String),
    #[error("missing system output for ids: {}", .0.join(", "))]
    MissingOutputs(Vec<String>),
    #[error("record {0:?} has no reference targets")]
    MissingTargets(String),
    #[error("score table has no cell for config {config} on dataset {dataset:?}")]
    MissingCell { config: String, dataset: String },
    #[error("score {value} for {what} is outside [0, 100]")]
    ScoreRange { what: String, value: f64 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
