use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution parameters for {kind}: {reason}")]
    InvalidMarginal { kind: &'static str, reason: String },

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityDomain(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("random vector must contain at least one marginal")]
    EmptyRandomVector,

    #[error("training set needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("training point {index} duplicates an existing point")]
    DuplicatePoint { index: usize },

    #[error("correlation matrix is ill-conditioned even with nugget {nugget:e}")]
    IllConditioned { nugget: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("effective sampling region is empty: no candidate available for selection")]
    EmptySelection,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("limit-state evaluation failed at pool index {index}: {reason}")]
    Evaluation { index: usize, reason: String },

    #[error("invalid engine configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
