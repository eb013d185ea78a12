use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested bath is larger than the exact-diagonalization cap.
    #[error("capacity error: N = {n} exceeds the exact-diagonalization cap of {cap}")]
    Capacity { n: usize, cap: usize },
    /// Structurally invalid input (mismatched arrays, non-Hermitian matrix, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// No revival exists for the given parameters.
    #[error("no revival: {0}")]
    NoRevival(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("spectrum cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
