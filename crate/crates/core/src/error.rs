use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular or numerically not invertible")]
    Singular,

    #[error("no positive scale solves the density-matching equation inside [1e-30, 1e30]")]
    NoSolution,

    #[error("eigenvalue magnitudes are not separated: {0}")]
    DegenerateSpectrum(String),

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{key}: {reason}")]
    Config { key: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("wrong region variant: {0}")]
    WrongVariant(String),

    #[error("rejected {rejected} of {attempted} channel draws, above the 1e-3 abort threshold")]
    ExcessiveRejection { rejected: u64, attempted: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { key: key.into(), reason: reason.into() }
    }

    /// True for errors caused by invalid user input rather than a numeric failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Precondition(_)
                | Error::DimensionMismatch { .. }
                | Error::WrongVariant(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
