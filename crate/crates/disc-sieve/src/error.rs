use disc_sieve_core::Error;

pub type RunResult<T> = Result<T, RunError>;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        RunError::Invalid(msg.into())
    }

    /// 3 for an exceeded budget, 1 for I/O failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(Error::BudgetExceeded { .. }) => 3,
            RunError::Io(_) => 1,
            _ => 2,
        }
    }
}
