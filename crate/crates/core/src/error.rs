use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("discriminant is zero")]
    ZeroDiscriminant,
    #[error("{0} is not a positive squarefree integer")]
    NotSquarefree(u64),
    #[error("enumeration budget exceeded: {needed} cases requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("matrix is not in W0")]
    NotInW0,
    #[error("shape violation: {0}")]
    Shape(String),
    #[error("Q-invariant vanishes")]
    QZero,
    #[error("root iteration did not converge")]
    NoConvergence,
    #[error("gram matrix is not positive definite")]
    DegenerateGram,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
