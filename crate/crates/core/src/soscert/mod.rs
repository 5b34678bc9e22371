//! Sum-of-squares certificates via the Gram matrix method.
//!
//! A small dense interior point solver finds a numeric Gram matrix or a
//! numeric separating functional. Both are then rounded to rationals and
//! checked exactly, so every reported verdict carries a certificate that
//! can be re-verified without floating point.

pub mod cert;
pub mod check;
pub mod sdp;
pub mod sos;

pub use cert::{
    gram_polynomial, ldl_squares, moment_matrix, Certificate, CertificateJson, Diagnostics, DualCertificate, GramProblem,
    SosCertificate, SosOutcome,
};
pub use check::{
    copositivity_cert, horn_restriction_check, sigma_d_check, sign_vectors, sonc_reznick_pass, CopositivityReport, HornReport,
    ReznickReport, RestrictionCheck, SigmaReport, SignBranch, Verdict,
};
pub use sos::{default_basis, parse_precision, precision_from_env, sos_check, SosOptions, DEFAULT_BASIS_CAP, DEFAULT_PRECISION, PRECISION_ENV};

use crate::groupring::GroupRingError;

#[derive(Debug, thiserror::Error)]
pub enum SosError {
    #[error("basis has {size} elements, above the cap of {cap}")]
    BasisTooLarge { size: usize, cap: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("polynomial has non-integral exponents: {0}")]
    FractionalExponent(String),
    #[error("no moment for exponent {0}")]
    MissingMoment(String),
    #[error("empty monomial basis")]
    EmptyBasis,
    #[error("invalid precision schedule `{0}`")]
    BadPrecision(String),
    #[error("certificate rejected: {0}")]
    Invalid(String),
    #[error("invalid certificate JSON: {0}")]
    Json(String),
    #[error("{0} is not a circuit polynomial")]
    NotACircuit(String),
    #[error(transparent)]
    GroupRing(#[from] GroupRingError),
}
