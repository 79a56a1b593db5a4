use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("outside domain: {0}")]
    Domain(String),

    /// Detuning lies on a resonance of an included intermediate manifold.
    #[error("resonance pole at detuning {delta:e} rad/s ({what})")]
    Pole { delta: f64, what: String },

    #[error("no solution: {reason} (achievable minimum {achievable_min:e})")]
    NoSolution { reason: String, achievable_min: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("missing data: {0}")]
    DataMissing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
