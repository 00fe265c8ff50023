use thiserror::Error;

/// Errors raised by the graph calculus.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A request exceeds a configured resource ceiling.
    #[error("capacity exceeded: {what} = {requested} (limit {limit})")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
