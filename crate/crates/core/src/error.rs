use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad item id, malformed parameters or a violated precondition.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The simplex could not produce a trustworthy answer.
    #[error("LP solver failure: {0}")]
    Solver(String),
    #[error("size guard exceeded: {0}")]
    TooLarge(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
