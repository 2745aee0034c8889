use thiserror::Error;

/// Errors raised while building, evaluating or comparing loss distributions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution has no density (point mass)")]
    NoDensity,

    #[error("moment order must be a positive integer, got {0}")]
    InvalidOrder(i64),

    #[error("moments are undefined: {0}")]
    MomentsUndefined(String),

    #[error("moment of order {k} is not positive; its logarithm is undefined")]
    NonPositiveMoment { k: usize },

    #[error("truncation window [{lower}, {upper}] carries no probability mass")]
    EmptyTruncation { lower: f64, upper: f64 },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("inadmissible loss distribution: {0}")]
    Inadmissible(String),

    #[error("meaningless comparison: {0}")]
    MeaninglessComparison(String),

    #[error("moment comparison undecided within {k_max} moments")]
    Undecided {
        k_max: usize,
        /// log m1(k) - log m2(k) for k = 1..=k_max.
        trace: Vec<f64>,
    },

    #[error("no tail threshold found: {0}")]
    ThresholdNotFound(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("line {line}: {message}")]
    RowError { line: usize, message: String },

    #[error("line {line}: score {score} lies outside the declared scale")]
    ScaleViolation { line: usize, score: f64 },

    #[error("index out of range: {0}")]
    RangeError(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = LossError> = std::result::Result<T, E>;
