use thiserror::Error;

/// A generic rational function was evaluated at a root of unity where its
/// denominator vanishes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pole at q = exp(i*pi/{p}): {what} vanishes")]
pub struct PoleError {
    pub p: u32,
    pub what: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error("scalar mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("summand identification failed: {0}")]
    Identification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
