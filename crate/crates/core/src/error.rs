use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("factorization budget exceeded; unfactored cofactor {cofactor}")]
    BudgetExceeded { cofactor: String },
    #[error("value needs about {needed} bits, cap is {cap}")]
    BitCapExceeded { needed: u64, cap: u64 },
    #[error("tuple lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("instance is degenerate on even indices")]
    DegenerateInstance,
    #[error("{subsets} subset analyses exceed the configured cap (k <= {max_k})")]
    SubsetBlowup { subsets: u64, max_k: usize },
    #[error("sigma at r_0 could not be fully factored; cofactor {cofactor}")]
    FactorizationIncomplete { cofactor: String },
    #[error("index {n} is below the integrality threshold {threshold}")]
    BelowThreshold { n: String, threshold: String },
    #[error("chain link {0} has an incomplete prime set; extension needs partial mode")]
    PartialChain(usize),
    #[error("comparison could not be decided within the refinement limit")]
    Undecided,
}

pub type Result<T> = std::result::Result<T, Error>;
