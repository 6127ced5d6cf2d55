use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubmodError {
    /// Malformed or out-of-range input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A memo-state precondition was violated (e.g. adding an element already in `X`).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NonConvergence {
        iterations: usize,
        gap: f64,
        best: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, SubmodError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SubmodError::InvalidInput(msg.into()))
}
