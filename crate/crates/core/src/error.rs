use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate point: radius {radius:e} is inside the pole exclusion zone")]
    DegeneratePoint { radius: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("simulation failed at step {step}: {reason}")]
    Simulation { step: usize, reason: String },

    #[error("failure budget exceeded: {failed} of {total} paths failed")]
    FailureBudget { failed: usize, total: usize },

    #[error("configuration errors:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
