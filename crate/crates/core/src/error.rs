use thiserror::Error;

/// Errors raised by dataset construction, protocols, estimators and loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("item id {item} is outside the universe of size {universe}")]
    ItemOutOfRange { item: u64, universe: u64 },

    #[error("universe size {0} exceeds the supported maximum of 2^48")]
    UniverseTooLarge(u64),

    #[error("a dataset needs at least one shard")]
    NoShards,

    #[error("dataset holds no items")]
    EmptyDataset,

    #[error("input has no samples")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid workload spec: {0}")]
    InvalidSpec(String),

    #[error("x_hint must be positive")]
    InvalidHint,

    #[error("pass mismatch: first pass saw {first} updates, second pass saw {second}")]
    PassMismatch { first: u64, second: u64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("file is empty")]
    EmptyFile,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
