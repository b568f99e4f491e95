use thiserror::Error;

/// Errors shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input where a nonzero integer is required")]
    Zero,
    #[error("degenerate input: discriminant is zero")]
    Degenerate,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("prime {0} is too small (need p >= 5)")]
    SmallPrime(u64),
    #[error("curve or cubic is not minimal at {0}")]
    NotMinimal(String),
    #[error("unclassifiable residue data: {0}")]
    Unclassifiable(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("undetermined residues at the chosen precision: {0}")]
    Undetermined(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("interval comparison is inconclusive: {0}")]
    Straddle(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("curve does not have good reduction at 2 and 3")]
    BadAt2Or3,
}

pub type Result<T> = std::result::Result<T, Error>;
