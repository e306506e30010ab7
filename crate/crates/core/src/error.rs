use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("infeasible matching: {0}")]
    Infeasible(String),
    #[error("branch-and-bound node budget of {0} exhausted")]
    Timeout(usize),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
