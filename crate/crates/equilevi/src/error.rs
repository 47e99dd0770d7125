use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero input")]
    ZeroInput,

    #[error("not a bundle datum: {0}")]
    NotABundle(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not an idempotent: {0}")]
    NonIdempotent(String),

    #[error("enlarge conductor: spectrum does not split; unsplit factors: {0:?}")]
    UnsplitSpectrum(Vec<String>),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant breach: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code mandated by the command surface:
    /// 2 for bad input, 3 for an internal invariant breach.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}
