//! The group ring `R[Q^n]`: finite sums of monomials with rational exponents,
//! read as functions on the positive orthant.

mod element;
mod exponent;
mod newton;
mod parse;

pub use element::{rational_power, EvalValue, GroupRingElement};
pub use exponent::Exponent;
pub use newton::{newton_bases, Polytope, SupportSet};
pub use parse::{parse_any, parse_element, ElementJson, ExpEntry, TermJson};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupRingError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("exponent {0} is not integral")]
    FractionalExponent(Exponent),
    #[error("exponent {0} has a negative coordinate")]
    NegativeExponent(Exponent),
    #[error("coordinate {0} of the evaluation point is not positive")]
    NonpositivePoint(usize),
    #[error("support is empty")]
    EmptySupport,
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid JSON polynomial: {0}")]
    Json(String),
}

impl GroupRingError {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        GroupRingError::Parse { line, col, msg: msg.into() }
    }
}
