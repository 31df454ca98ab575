use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Exhaustive subset enumeration would exceed the configured cap.
    #[error("enumeration budget exceeded: C({n}, {k}) = {required} subsets, cap is {cap}")]
    BudgetExceeded {
        n: usize,
        k: usize,
        required: u128,
        cap: u64,
    },

    #[error("no uncensored samples among {reps} replications")]
    NoUncensoredSamples { reps: u64 },

    #[error("method inapplicable: {0}")]
    Inapplicable(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
