use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("lattice containment violated: {0}")]
    NotContained(String),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("enumeration would examine {0} candidates, above the limit {1}")]
    EnumerationBound(u128, u128),
    #[error("valuation of zero element")]
    ZeroElement,
    #[error("ambiguous valuation: minimal terms of {0} may cancel")]
    AmbiguousValuation(String),
    #[error("element has nonzero value, no residue: {0}")]
    NonUnit(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("incompatible generators: {0}")]
    Incompatible(String),
    #[error("declared p-th power: {0}")]
    DeclaredPthPower(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
