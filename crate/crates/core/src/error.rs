use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterated logarithm (or similar) is undefined at the requested index.
    #[error("range error: {what} requires argument > {min}, got {got}")]
    Range { what: &'static str, min: f64, got: f64 },

    /// A computation would exceed its work or memory budget.
    #[error("resource error: {0}")]
    Resource(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A monotone search did not reach its threshold within the iteration cap.
    #[error("search exhausted after {evaluations} evaluations without reaching {threshold}")]
    Exhausted { evaluations: u64, threshold: f64 },

    /// Not enough nonzero data to fit a rate or exponent.
    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("insufficient signal: only lags {usable:?} are above the noise floor (need {needed})")]
    InsufficientSignal { usable: Vec<u64>, needed: usize },

    /// A ball schedule or system could not be built.
    #[error("construction error: {0}")]
    Construction(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
