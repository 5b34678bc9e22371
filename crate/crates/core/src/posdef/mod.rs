//! Positive (semi)definite functions on `Q`: exponential sums, their Gram
//! and Hankel matrices, and moment integrals over an interval.

mod function;
mod gram;
mod hankel;

pub use function::{ExpSumFunction, ExpSumJson, FnValue, MomentFunction};
pub use gram::{
    certify_moment_gram_pd, certify_not_kpsd, gram_matrix, kernel_recipe, moment_gram, GramSample, GridSearch,
    NotKpsdWitness,
};
pub use hankel::{approx, find_epsilon_kpd, hankel_matrix, verify_epsilon, EpsilonCertificate, HankelSample, HankelVerdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosdefError {
    #[error("base {0} is not admissible")]
    InvalidBase(String),
    #[error("bases must be pairwise distinct")]
    RepeatedBase,
    #[error("expected {expected} bases, got {got}")]
    WrongBaseCount { expected: usize, got: usize },
    #[error("points must be pairwise distinct")]
    RepeatedPoint,
    #[error("interval must have a < b")]
    EmptyInterval,
    #[error("no violation found on windows starting at {start}..={end}")]
    NotFound { start: i64, end: i64 },
    #[error("precision cap of {0} bits reached without a certified answer")]
    PrecisionInsufficient(u32),
    #[error("matrix is certified not positive definite")]
    NotPositiveDefinite,
    #[error("invalid function JSON: {0}")]
    Json(String),
}
