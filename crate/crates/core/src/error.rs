use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected} nodes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pair ({0}, {0}) is not a dyad: self-loops are not part of the ensemble")]
    SelfPair(usize),

    #[error("node index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown year {0}")]
    UnknownYear(i32),

    #[error("unknown layer {0:?}")]
    UnknownLayer(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("argument outside the domain of the function: {0}")]
    Domain(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("nesting violated: ECM log-likelihood {ecm} is below WCM log-likelihood {wcm}")]
    NestingViolated { ecm: f64, wcm: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, len })
    }
}
