use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent {0} is below 1")]
    ExponentBelowOne(String),
    #[error("cannot parse exponent `{0}`")]
    ParseExponent(String),
    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent mismatch: {left} vs {right}")]
    ExponentMismatch { left: String, right: String },
    #[error("matrix or vector entry is not finite")]
    NonFinite,
    #[error("enumeration needs {needed} configurations, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vector family must contain at least one vector")]
    EmptyFamily,
    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
