//! Data ingestion, synthetic instances, exhaustive oracles and the timing
//! harness behind the `submemo` command-line tool.

pub mod brute;
pub mod cli;
pub mod experiment;
pub mod io;
pub mod synth;

use submemo::SubmodError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] SubmodError),
}

impl BenchError {
    /// Process exit code: 2 for bad input, 3 when a solver did not converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Solver(SubmodError::NonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn input_error<T>(msg: impl Into<String>) -> Result<T, BenchError> {
    Err(BenchError::Input(msg.into()))
}
