use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("bad group spec: {0}")]
    BadSpec(String),
    #[error("subset is not a subgroup")]
    NotASubgroup,
    #[error("element index {index} out of range for group of order {order}")]
    InvalidElement { index: usize, order: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("arc ({from}, {to}) is not present")]
    MissingArc { from: usize, to: usize },
    #[error("arc mask is not symmetric")]
    AsymmetricMask,
    #[error("operation requires a complete digraph")]
    IncompleteDigraph,
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("bad size: {0}")]
    BadSize(String),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("malformed witness: {0}")]
    BadWitness(String),
    #[error("{what} has {size} vertices, above the cap of {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("vertex {0} is not in the scope set")]
    NotInScope(usize),
    #[error("operation requires a non-trivial group")]
    TrivialGroup,
    #[error("group order {0} is not prime")]
    NotPrime(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no certificate exists outside the lemma hypothesis: {0}")]
    OutsideHypothesis(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
