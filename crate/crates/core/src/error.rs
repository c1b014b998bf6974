use thiserror::Error;

use crate::bigraded::Bidegree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operand from wrong field: {0}")]
    WrongField(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("d^2 != 0 at bidegree {0}")]
    NotSquareZero(Bidegree),
    #[error("window insufficient: need internal degrees [{needed_min}, {needed_max}] of {what}")]
    WindowInsufficient {
        what: String,
        needed_min: i64,
        needed_max: i64,
    },
    #[error("unbounded cohomological support in internal degree {0}")]
    UnboundedSupport(i64),
    #[error("module is not semi-free; resolve it first")]
    NotSemiFree,
    #[error("invalid generator complex: {0}")]
    InvalidComplex(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("chain map violation: {0}")]
    NotChainMap(String),
    #[error("unbounded direction: {0}")]
    Unbounded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn window(what: impl Into<String>, needed_min: i64, needed_max: i64) -> Self {
        Error::WindowInsufficient {
            what: what.into(),
            needed_min,
            needed_max,
        }
    }
}
