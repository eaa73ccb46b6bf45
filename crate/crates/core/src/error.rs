use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The request is well formed but exceeds an enumeration or memory budget.
    #[error("capacity exceeded: {what} is {value}, limit {limit}")]
    Capacity {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("lifted colouring at m = {m} references index {index} outside [1, {n}]")]
    Domain { m: u64, index: u64, n: u64 },

    #[error("divisibility failure: {divisor} does not divide {name} = {value}")]
    Divisibility { name: String, value: i128, divisor: i128 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Capacity and overflow errors both mean "too big for this engine".
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. } | Error::Overflow(_))
    }
}
