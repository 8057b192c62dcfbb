use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),

    #[error("non-numeric value {value:?} at row {row}, column `{column}`")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("fewer than 2 classes in data")]
    TooFewClasses,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("targets contain a single class")]
    SingleClassTargets,

    #[error("non-finite value encountered during {0}")]
    NonFinite(&'static str),

    #[error("design matrix has {rows} rows but {cols} basis terms")]
    Underdetermined { rows: usize, cols: usize },

    #[error("normal equations are singular even with ridge jitter")]
    RankDeficient,

    #[error("need at least 2 features, got {0}")]
    TooFewFeatures(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("untrained model")]
    Untrained,

    #[error("feature column {0} is not present in the input")]
    MissingFeature(usize),

    #[error("class pair ({0}, {1}) has no examples on one side")]
    EmptyClassPair(usize, usize),

    #[error("incomplete pairwise outputs: missing pair ({0}, {1})")]
    IncompletePairs(usize, usize),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("model format: {0}")]
    ModelFormat(String),
}
