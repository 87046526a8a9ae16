use thiserror::Error;

/// Errors raised by group construction, queries and the file format.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero is infinite")]
    InfiniteValuation,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("registry mismatch")]
    RegistryMismatch,
    #[error("unknown prime class `{0}`")]
    UnknownClass(String),
    #[error("invalid registry: {0}")]
    InvalidRegistry(String),
    #[error("scalars over different prime families cannot be combined ({0} vs {1})")]
    FamilyMismatch(String, String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("zero is not allowed here: {0}")]
    Zero(&'static str),
    #[error("element is not a member of the group")]
    NotMember,
    #[error("invalid local data for class {class}: {reason}")]
    InvalidLocal { class: String, reason: String },
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("ill-posed query: {0}")]
    IllPosed(String),
    #[error("realization rejected: {0}")]
    Realization(String),
    #[error("enumeration budget exceeded: {needed} candidates > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
