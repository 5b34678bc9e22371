//! Exact rational scalars and dense linear algebra.

pub mod linalg;
pub mod lp;
pub mod matrix;
pub mod rat;

pub use matrix::{psd_check, MatrixError, PsdStatus, PsdVerdict, SymRatMatrix};
pub use rat::{fmt_rat, int, parse_rat, rat, Rat};
