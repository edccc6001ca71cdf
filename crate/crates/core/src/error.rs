use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("element is not homogeneous")]
    NonHomogeneous,
    #[error("slot must be a spectral variable, not d")]
    PartialSlot,
    #[error("polynomial involves forbidden variable: {0}")]
    ForbiddenVariable(String),
    #[error("grading violation: {0}")]
    Grading(String),
    #[error("bracket table: {0}")]
    Table(String),
    #[error("unknown built-in algebra `{0}`")]
    UnknownBuiltin(String),
    #[error("algebra fails its axioms: {0}")]
    AxiomsFailed(String),
    #[error("map is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("map is not invertible over Q[d]: {0}")]
    NotInvertible(String),
    #[error("degree bound mismatch: {0}")]
    BoundMismatch(String),
    #[error("window too short: {0}")]
    WindowTooShort(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
