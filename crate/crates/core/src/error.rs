use thiserror::Error;

use crate::torsor::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An exact computation would leave the representable range, or an
    /// enumeration would exceed its configured budget.
    #[error("capacity exceeded in {op}: {detail}")]
    Capacity { op: &'static str, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point is not primitive")]
    NotPrimitive,

    #[error("point is not in the open subset U (off the surface, zero, or on a line)")]
    NotInOpenSubset,

    #[error("invalid torsor coordinates: {0}")]
    InvalidTorsor(Violation),

    /// A divisibility or coprimality check failed on data that should have
    /// satisfied it. Always a bug, never a property of valid input.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn capacity(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Capacity {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn overflow(op: &'static str) -> Self {
        Error::capacity(op, "integer overflow")
    }
}
