use thiserror::Error;

/// Errors raised by dataset construction, learners and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value {value} at row {row}, column {column}")]
    NonFinite { row: usize, column: usize, value: String },

    #[error("sign of a non-finite value")]
    NonFiniteSign,

    #[error("dataset must have at least one row and one column (got {rows}x{cols})")]
    EmptyDataset { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid weight distribution: {0}")]
    InvalidWeights(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("voter has zero total coefficient mass")]
    ZeroMass,

    #[error("invalid voter: {0}")]
    InvalidVoter(String),

    #[error("ensemble has no voters")]
    EmptyEnsemble,

    #[error("no weak hypothesis with advantage")]
    NoAdvantage,

    #[error("insufficient samples for partition: {rows} rows into {k} blocks")]
    InsufficientSamples { rows: usize, k: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("weak learner failed: {0}")]
    WeakLearner(String),

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse { path: String, row: usize, column: usize, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("plan: {0}")]
    Plan(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
