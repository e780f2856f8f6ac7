use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine exhausted its budget; no partial answer is returned.
    #[error("{routine} did not converge within {budget} iterations")]
    NonConvergence { routine: &'static str, budget: usize },

    /// The requested power cannot be reached for this design.
    #[error("target power {target} is unreachable: {reason}")]
    Unreachable { target: f64, reason: String },

    /// Malformed study table input.
    #[error("line {line}, column `{column}`: {message}")]
    Parse { line: u64, column: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
