//! Truncated Hahn series over `Q` with value group `Q^n` in lex order, PSD
//! tests for matrices of series, and the coefficientwise maps `L_f`.

mod coefmap;
mod json;
mod kpos;
mod matrix;
mod series;

pub use coefmap::{apply_lf, apply_lf_with, CoefMap, CoefValue, Template, COEF_BITS};
pub use json::{SeriesJson, SeriesTermJson};
pub use kpos::{
    test_k_positivity, Counterexample, KPositivityConfig, KPositivityReport, LemmaCheck, LemmaStatus, ProbeResult, TrialOutcome,
};
pub use matrix::{gram_of, hadamard, psd_check_hahn, quad_form, residue_matrix, HahnMatrix, HahnPsdVerdict};
pub use series::{HahnSeries, Valuation};

use crate::groupring::Exponent;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HahnError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by a series that is zero up to its cutoff")]
    DivisionByZero,
    #[error("truncation exhausted: {0}")]
    TruncationExhausted(String),
    #[error("square root of a negative element")]
    NegativeElement,
    #[error("leading coefficient {0} is not a rational square")]
    IrrationalRoot(String),
    #[error("residue undefined: valuation {0} is negative")]
    NegativeValuation(Exponent),
    #[error("indeterminate at truncation: {0}")]
    IndeterminateAtTruncation(String),
    #[error("coefficient map vanishes at {0}")]
    ZeroCoefficient(Exponent),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("invalid series JSON: {0}")]
    Json(String),
}
