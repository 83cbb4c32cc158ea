use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NcqmError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("no convergence after {iterations} iterations: {detail}")]
    Convergence { iterations: usize, detail: String },
    #[error("no sign change of the quantization residual on [{low}, {high}]")]
    Bracketing { low: f64, high: f64 },
    #[error("wrong usage: {0}")]
    Usage(String),
    #[error("state is not normalizable: {0}")]
    Normalizability(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, NcqmError>;
