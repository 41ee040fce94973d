use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("class mismatch: cocycle periods {found:?} disagree with class pairing {expected:?}")]
    ClassMismatch { expected: Vec<i64>, found: Vec<i64> },

    #[error("point or path outside the coordinate domain: {0}")]
    Domain(String),

    #[error("map is not invertible: {0}")]
    NonInvertible(String),

    #[error("unsupported flavor: {0}")]
    UnsupportedFlavor(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
