use thiserror::Error;

/// Errors surfaced by the library and mapped to process exit codes by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (algebra file, partition literal, term, package file).
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed input that violates a precondition
    /// (non-congruence where one is required, arity mismatch, failed package
    /// verification, unknown name, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The number of stored cubes exceeded the memory budget.
    #[error("memory budget exceeded: {stored} cubes stored, limit {limit}")]
    Budget { stored: usize, limit: usize },

    /// The wall-clock deadline passed while `{0}` was running.
    #[error("time limit exceeded during {0}")]
    Timeout(String),

    /// An internal structural cap was hit (not user-tunable).
    #[error("{what} exceeds internal cap {limit}")]
    Cap { what: &'static str, limit: usize },

    /// Two independently computed values that must agree did not.
    /// Indicates a bug in this crate, never bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 2 for input problems, 3 for resource exhaustion,
    /// 1 for everything that means "the run failed".
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Invalid(_) => 2,
            Error::Budget { .. } | Error::Timeout(_) | Error::Cap { .. } => 3,
            Error::Internal(_) | Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
