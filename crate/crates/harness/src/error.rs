use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes of the `reak` binary.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// I/O and other unexpected failures.
    pub const INTERNAL: i32 = 1;
    pub const CONFIG: i32 = 2;
    /// The engine finished but flagged its result as not converged.
    pub const NOT_CONVERGED: i32 = 3;
    pub const EVALUATOR: i32 = 4;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("limit-state evaluator failed: {0}")]
    Evaluator(String),

    #[error("engine error: {0}")]
    Engine(reak_core::Error),

    #[error("run did not converge: {0}")]
    NotConverged(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Output(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => exit::CONFIG,
            HarnessError::Evaluator(_) => exit::EVALUATOR,
            HarnessError::NotConverged(_) => exit::NOT_CONVERGED,
            HarnessError::Engine(_) | HarnessError::Io { .. } | HarnessError::Output(_) => exit::INTERNAL,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<reak_core::Error> for HarnessError {
    fn from(e: reak_core::Error) -> Self {
        match e {
            reak_core::Error::Evaluation { .. } => HarnessError::Evaluator(e.to_string()),
            reak_core::Error::Config(msg) => HarnessError::Config(msg),
            other => HarnessError::Engine(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
