//! Error type shared across the crate.

/// Crate-wide error enum.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("data consistency error: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate sampling design: {0}")]
    DegenerateDesign(String),

    #[error("invalid fold specification: {0}")]
    InvalidFolds(String),

    #[error("degenerate targets: {0}")]
    DegenerateTarget(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("training fold {fold} has no labeled units")]
    FoldStarvation { fold: usize },

    #[error("invalid prior moments: variance {variance} must be positive and below mean(1-mean) = {limit}")]
    InvalidMoments { variance: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
