use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::function::ExpSumFunction;
use super::PosdefError;
use crate::exact::rat::{to_f64, Rat};
use crate::interval::{interval_leading_minors, interval_minor, ln_rat, Interval};

/// Certified classification of an interval matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HankelVerdict {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    /// Some principal minor encloses zero without being exactly zero.
    Undecided,
}

/// `H_f(x) = (f^{(i+j)}(x))_{0≤i,j<k}` as an interval matrix.
#[derive(Clone, Debug)]
pub struct HankelSample {
    pub x: Rat,
    pub k: usize,
    pub entries: Vec<Vec<Interval>>,
    pub leading_minors: Vec<Interval>,
    pub verdict: HankelVerdict,
    /// Working precision that met the requested width.
    pub bits: u32,
}

impl HankelSample {
    pub fn det(&self) -> &Interval {
        self.leading_minors.last().expect("k >= 1")
    }
}

const MAX_BITS: u32 = 4096;

fn classify(m: &[Vec<Interval>], bits: u32) -> (Vec<Interval>, HankelVerdict) {
    let lead = interval_leading_minors(m, bits);
    if lead.iter().all(Interval::certainly_positive) {
        return (lead, HankelVerdict::PositiveDefinite);
    }
    let n = m.len();
    let mut all_nonneg = true;
    for mask in 1usize..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let d = interval_minor(m, &idx, bits);
        if d.certainly_negative() {
            return (lead, HankelVerdict::Indefinite);
        }
        if !(d.certainly_positive() || d.certified_sign() == Some(0)) {
            all_nonneg = false;
        }
    }
    let v = if all_nonneg { HankelVerdict::PositiveSemidefinite } else { HankelVerdict::Undecided };
    (lead, v)
}

/// Builds the order-`k` Hankel matrix at `x`, refining precision until every
/// entry and every leading minor is narrower than `width`.
pub fn hankel_matrix(f: &ExpSumFunction, x: &Rat, k: usize, width: &Rat) -> Result<HankelSample, PosdefError> {
    assert!(k >= 1, "hankel order must be positive");
    let mut bits = 32;
    while bits <= MAX_BITS {
        let derivs: Vec<Interval> = (0..2 * k - 1).map(|r| f.derivative(r as u32, x, bits)).collect();
        let entries: Vec<Vec<Interval>> = (0..k).map(|i| (0..k).map(|j| derivs[i + j].clone()).collect()).collect();
        let (lead, verdict) = classify(&entries, bits + 16);
        let narrow = entries.iter().flatten().chain(lead.iter()).all(|iv| &iv.width() <= width);
        if narrow && verdict != HankelVerdict::Undecided {
            return Ok(HankelSample { x: x.clone(), k, entries, leading_minors: lead, verdict, bits });
        }
        // A minor that keeps enclosing zero after a few refinements is
        // reported as undecided rather than refined forever.
        if narrow && bits >= 256 {
            return Ok(HankelSample { x: x.clone(), k, entries, leading_minors: lead, verdict, bits });
        }
        bits *= 2;
    }
    Err(PosdefError::PrecisionInsufficient(MAX_BITS))
}

/// The matrices `A = Σ v_m v_mᵀ` with `v_m = (1, a_m, …, a_m^{k-1})` and
/// `A′` with `a_m` replaced by `−a_m`, where `a_m = ln b_m`.
fn moment_matrices(bases: &[Rat], bits: u32) -> (Vec<Vec<Interval>>, Vec<Vec<Interval>>) {
    let k = bases.len();
    let logs: Vec<Interval> = bases.iter().map(|b| ln_rat(b, bits)).collect();
    let build = |sign: bool| {
        let mut m = vec![vec![Interval::zero(); k]; k];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut s = Interval::zero();
                for l in &logs {
                    let mut p = l.powi((i + j) as u32);
                    if sign && (i + j) % 2 == 1 {
                        p = p.neg();
                    }
                    s = s.add(&p);
                }
                *cell = s.round_out(bits);
            }
        }
        m
    };
    (build(false), build(true))
}

fn check_bases(bases: &[Rat], k: usize) -> Result<(), PosdefError> {
    if bases.len() != k || k == 0 {
        return Err(PosdefError::WrongBaseCount { expected: k, got: bases.len() });
    }
    for (i, b) in bases.iter().enumerate() {
        if b <= &Rat::one() {
            return Err(PosdefError::InvalidBase(crate::exact::rat::fmt_rat(b)));
        }
        if bases[..i].contains(b) {
            return Err(PosdefError::RepeatedBase);
        }
    }
    Ok(())
}

/// A certified choice of `ε` for `f_ε = g + ḡ − ε`.
#[derive(Clone, Debug)]
pub struct EpsilonCertificate {
    pub eps: Rat,
    /// Certified lower bound on the largest admissible `ε`.
    pub eps_max_lower: Rat,
    /// Leading minors of `A − εδ₁δ₁ᵀ` and of `A′ − εδ₁δ₁ᵀ`.
    pub minors: Vec<Interval>,
    pub minors_reflected: Vec<Interval>,
    pub bits: u32,
}

fn shifted(m: &[Vec<Interval>], eps: &Rat) -> Vec<Vec<Interval>> {
    let mut out = m.to_vec();
    out[0][0] = out[0][0].add_rat(&-eps.clone());
    out
}

/// Checks with interval arithmetic that `A − εδ₁δ₁ᵀ` and `A′ − εδ₁δ₁ᵀ` are
/// positive definite. Returns the certificate or `None` if not certified.
pub fn verify_epsilon(bases: &[Rat], eps: &Rat) -> Result<Option<EpsilonCertificate>, PosdefError> {
    check_bases(bases, bases.len())?;
    if !eps.is_positive() {
        return Ok(None);
    }
    let mut bits = 64;
    while bits <= MAX_BITS {
        let (a, ar) = moment_matrices(bases, bits);
        let m1 = interval_leading_minors(&shifted(&a, eps), bits + 16);
        let m2 = interval_leading_minors(&shifted(&ar, eps), bits + 16);
        if m1.iter().chain(&m2).any(Interval::certainly_negative) {
            return Ok(None);
        }
        if m1.iter().chain(&m2).all(Interval::certainly_positive) {
            return Ok(Some(EpsilonCertificate { eps: eps.clone(), eps_max_lower: Rat::zero(), minors: m1, minors_reflected: m2, bits }));
        }
        bits *= 2;
    }
    Ok(None)
}

/// Finds `ε = 1/(N+1)` below the largest admissible value
/// `det(A) / det(A with first row and column removed)`.
pub fn find_epsilon_kpd(bases: &[Rat], k: usize) -> Result<EpsilonCertificate, PosdefError> {
    check_bases(bases, k)?;
    let mut bits = 64;
    while bits <= MAX_BITS {
        let (a, _) = moment_matrices(bases, bits);
        let full: Vec<usize> = (0..k).collect();
        let det = interval_minor(&a, &full, bits + 16);
        let tail = interval_minor(&a, &full[1..], bits + 16);
        if det.certainly_positive() && tail.certainly_positive() {
            let lower = det.lo() / tail.hi();
            // ε = 1/(⌊1/L⌋ + 1) < L.
            let n = (lower.recip()).floor().to_integer() + BigInt::one();
            let eps = Rat::new(BigInt::one(), n);
            if let Some(mut cert) = verify_epsilon(bases, &eps)? {
                cert.eps_max_lower = lower;
                return Ok(cert);
            }
        }
        bits *= 2;
    }
    Err(PosdefError::PrecisionInsufficient(MAX_BITS))
}

/// Floating-point view of an enclosure's midpoint, for reports.
pub fn approx(iv: &Interval) -> f64 {
    to_f64(&iv.mid())
}
