use thiserror::Error;

use crate::arith::ArithError;

/// Errors shared by every layer of the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid class parameters: {0}")]
    InvalidParams(String),
    #[error("wrong group: {0}")]
    WrongGroup(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("tuple too long: {len} classes, cap {cap}")]
    TupleTooLong { len: usize, cap: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("no closed form for this pattern: {0}")]
    NoClosedForm(String),
    #[error("3 does not divide q±1 here: {0}")]
    NotSplitCase(String),
    #[error("non-integral structure constant: {0}")]
    IntegralityViolation(String),
    #[error("cross-check failure: {0}")]
    CrossCheckFailure(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("closure size mismatch: got {got}, expected {expected}")]
    ClosureSizeMismatch { got: u64, expected: u64 },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the CLI: 2 for bad input, 3 for capacity
    /// limits, 4 for internal inconsistencies.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::InvalidParams(_)
            | Error::WrongGroup(_)
            | Error::IndexOutOfRange(_)
            | Error::NotSplitCase(_)
            | Error::NoClosedForm(_) => 2,
            Error::Arith(ArithError::CapacityExceeded(_))
            | Error::CapacityExceeded(_)
            | Error::TupleTooLong { .. } => 3,
            Error::Arith(_) => 2,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
