use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} of size {requested} exceeds the configured cap {limit}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("collection did not terminate within {rewrites} rewrites")]
    NonTermination { rewrites: usize },
    #[error("coset enumeration exceeded the coset limit {limit}; oracle inconclusive")]
    OracleInconclusive { limit: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("structural check failed: {message} (counterexample {witness:?})")]
    Structural {
        message: String,
        witness: Vec<usize>,
    },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn structural(message: impl Into<String>, witness: Vec<usize>) -> Self {
        Error::Structural {
            message: message.into(),
            witness,
        }
    }
}
