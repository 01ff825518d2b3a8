use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("measure not positive definite to required degree ({0})")]
    NotPositiveDefinite(String),
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("node outside [-1,1]: {0}")]
    NodeOutOfRange(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("potential error: {0}")]
    Potential(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
