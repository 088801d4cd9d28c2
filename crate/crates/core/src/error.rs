use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("value outside the function domain: {0}")]
    Domain(String),

    #[error("bracket does not straddle a sign change: {0}")]
    Bracket(String),

    #[error("no forbidden region: {0}")]
    NoForbiddenRegion(String),

    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("solution rejected: {0}")]
    InvalidSolution(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
