use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("-{0} is not an odd fundamental discriminant")]
    NotFundamental(u64),
    #[error("forms have different discriminants")]
    DiscriminantMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),
    #[error("auxiliary prime search exhausted below {0}")]
    SearchExhausted(u64),
    #[error("auxiliary prime inconsistent with (D, N, m): {0}")]
    InconsistentAuxiliary(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not a cuspidal eigenvector")]
    NotCuspidal,
}

pub type Result<T> = std::result::Result<T, Error>;
