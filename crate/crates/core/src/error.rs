use thiserror::Error;

#[derive(Debug, Error)]
pub enum QglError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical verification failed: {0}")]
    Numerical(String),
    #[error("not a Schur idempotent (residual {0:.3e})")]
    NotIdempotent(f64),
}

impl QglError {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            QglError::Numerical(_) | QglError::NotIdempotent(_) | QglError::NotHermitian(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, QglError>;
