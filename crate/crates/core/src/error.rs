use thiserror::Error;

/// Errors raised by the engine. Column and row indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("column {0} is the zero vector")]
    ZeroColumn(usize),
    #[error("row {0} does not sum to 0 mod N")]
    RowSumNonzero(usize),
    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("genus formula produced a non-integral value {0}")]
    NonIntegralGenus(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("branch points are not pairwise distinct")]
    RepeatedPoint,
    #[error("prime {p} is not congruent to 1 mod {modulus}")]
    CharacterMismatch { p: u64, modulus: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("symbolic expansion needs {terms} terms, limit is {limit}")]
    TermLimitExceeded { terms: u128, limit: u128 },
    #[error("search box has {raw} raw matrices, limit is {limit}")]
    SpecTooLarge { raw: u128, limit: u128 },
    #[error("unsupported simple factor for type ({a},{b}), order2={order2}")]
    UnsupportedFactor { a: u32, b: u32, order2: bool },
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// Machine-readable variant name, printed on stderr by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::BadShape(_) => "BadShape",
            Error::ZeroColumn(_) => "ZeroColumn",
            Error::RowSumNonzero(_) => "RowSumNonzero",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NonIntegralGenus(_) => "NonIntegralGenus",
            Error::Parse(_) => "Parse",
            Error::RepeatedPoint => "RepeatedPoint",
            Error::CharacterMismatch { .. } => "CharacterMismatch",
            Error::NotPrime(_) => "NotPrime",
            Error::TermLimitExceeded { .. } => "TermLimitExceeded",
            Error::SpecTooLarge { .. } => "SpecTooLarge",
            Error::UnsupportedFactor { .. } => "UnsupportedFactor",
            Error::InvalidSpec(_) => "InvalidSpec",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
