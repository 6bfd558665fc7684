//! Shared error type for the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A tensor shape did not line up, reported with the offending layer.
    #[error("dimension mismatch at layer {layer}: {detail}")]
    Dimension { layer: usize, detail: String },

    /// A caller-supplied argument was invalid.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The input data does not satisfy the schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A cell could not be parsed. Rows are 0-based data rows (the header
    /// is not counted).
    #[error("parse error at row {row}, column {column:?}: {detail}")]
    Parse {
        row: usize,
        column: String,
        detail: String,
    },

    /// A discrete value was not in the fitted vocabulary.
    #[error("unknown category {value:?} in column {column:?}")]
    Vocabulary { value: String, column: String },

    /// A continuous column with no spread cannot be scaled.
    #[error("degenerate column {0:?}: observed min equals max")]
    DegenerateColumn(String),

    /// Mismatched caches, layouts, or other cross-object state.
    #[error("inconsistent state: {0}")]
    State(String),

    /// Non-finite values where finite math was required.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A distributed worker failed; the step was rolled back.
    #[error("worker {worker} failed: {detail}")]
    Worker { worker: usize, detail: String },

    /// A comparison metric with a zero denominator.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
