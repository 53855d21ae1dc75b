//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar from {0:?}")]
    ParseScalar(String),
    #[error("polynomial parse error at byte {pos}: {msg}")]
    ParsePoly { pos: usize, msg: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("degree map required but absent")]
    MissingDegrees,
    #[error("algebra is not stratified: {0}")]
    NotStratified(String),
    #[error("algebra is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("matrix space is not closed under commutator")]
    NotClosed,
    #[error("matrix {0} is not a derivation of the algebra")]
    NotDerivation(usize),
    #[error("invalid algebra description: {0}")]
    Description(String),
    #[error("unbound parameter {0:?}")]
    UnboundParameter(String),
    #[error("modification does not close: first failing pair ({left}, {right})")]
    ClosureFailed { left: String, right: String },
    #[error("singular matrix")]
    SingularMatrix,
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalog(String),
    #[error("not a valid polarization: {0}")]
    NotPolarization(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("zero scaling factor is not an automorphism")]
    ZeroDilation,
}

pub type Result<T> = std::result::Result<T, Error>;
