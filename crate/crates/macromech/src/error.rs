//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration file or invalid parameter combination.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical invariant (e.g. I <= <b†b>, normalization) was violated.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// An iterative routine failed to reach its tolerance.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Argument outside the supported range (e.g. Hermite order overflow).
    #[error("range error: {0}")]
    Range(String),

    /// A measurement record with vanishing probability.
    #[error("degenerate measurement outcome: {0}")]
    DegenerateOutcome(String),

    /// Malformed input table row.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 1 config, 2 invariant, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Io(_) => 1,
            Error::Invariant(_) | Error::DegenerateOutcome(_) => 2,
            Error::NonConvergence(_) | Error::Range(_) => 3,
        }
    }
}
