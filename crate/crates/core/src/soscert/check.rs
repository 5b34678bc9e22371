use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::cert::SosOutcome;
use super::sos::{sos_check, SosOptions};
use super::SosError;
use crate::exact::{fmt_rat, Rat};
use crate::exact::SymRatMatrix;
use crate::groupring::{GroupRingElement, SupportSet};
use crate::instances::{circuit_detect, even_quadratic_form, horn, CircuitReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One sign pattern `s` of a `Σ_d` test.
#[derive(Clone, Debug)]
pub struct SignBranch {
    pub signs: Vec<i8>,
    /// `ψ_d(φ_s(p))`.
    pub polynomial: GroupRingElement,
    /// Index of an earlier branch with the same polynomial, whose outcome
    /// is reused.
    pub same_as: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub d: u64,
    pub branches: Vec<SignBranch>,
    /// Outcomes of the distinct branches, indexed like `branches`; reused
    /// branches hold `None`.
    pub outcomes: Vec<Option<SosOutcome>>,
    pub verdict: Verdict,
}

impl SigmaReport {
    pub fn outcome(&self, i: usize) -> &SosOutcome {
        let j = self.branches[i].same_as.unwrap_or(i);
        self.outcomes[j].as_ref().expect("distinct branches carry outcomes")
    }

    pub fn distinct(&self) -> impl Iterator<Item = (usize, &SosOutcome)> {
        self.outcomes.iter().enumerate().filter_map(|(i, o)| o.as_ref().map(|o| (i, o)))
    }
}

fn combine(outcomes: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut v = Verdict::Pass;
    for o in outcomes {
        match o {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Inconclusive => v = Verdict::Inconclusive,
            Verdict::Pass => {}
        }
    }
    v
}

fn verdict_of(o: &SosOutcome) -> Verdict {
    match o {
        SosOutcome::Sos(_) => Verdict::Pass,
        SosOutcome::NotSos(_) => Verdict::Fail,
        SosOutcome::Inconclusive(_) => Verdict::Inconclusive,
    }
}

/// All sign vectors in `{±1}^n`, starting with all plus signs.
pub fn sign_vectors(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n).map(|mask| (0..n).map(|i| if mask & (1 << i) != 0 { -1 } else { 1 }).collect()).collect()
}

/// Tests `p ∈ Σ_d(S)`: for every sign vector `s`, `ψ_d(φ_s(p))` must be a sum
/// of squares (`φ_s` is an involution). Sign patterns giving the same
/// polynomial are checked once; distinct ones run in parallel.
pub fn sigma_d_check(p: &GroupRingElement, d: u64, opts: &SosOptions) -> Result<SigmaReport, SosError> {
    if d == 0 {
        return Err(SosError::Invalid("d must be positive".into()));
    }
    let mut branches: Vec<SignBranch> = Vec::new();
    for s in sign_vectors(p.dim()) {
        let q = p.phi_s(&s)?.psi_d(d);
        let same_as = branches.iter().position(|b| b.same_as.is_none() && b.polynomial == q);
        branches.push(SignBranch { signs: s, polynomial: q, same_as });
    }
    let distinct: Vec<usize> = (0..branches.len()).filter(|&i| branches[i].same_as.is_none()).collect();
    let results: Vec<(usize, Result<SosOutcome, SosError>)> =
        distinct.par_iter().map(|&i| (i, sos_check(&branches[i].polynomial, opts))).collect();
    let mut outcomes: Vec<Option<SosOutcome>> = vec![None; branches.len()];
    for (i, r) in results {
        outcomes[i] = Some(r?);
    }
    let verdict = combine(outcomes.iter().flatten().map(verdict_of));
    Ok(SigmaReport { d, branches, outcomes, verdict })
}

/// Per-level outcomes of the copositivity search.
#[derive(Clone, Debug)]
pub struct CopositivityReport {
    pub q: SymRatMatrix,
    pub p: GroupRingElement,
    /// A standard basis vector `e_i` with `Q_ii < 0`.
    pub falsifier: Option<usize>,
    pub levels: Vec<(u64, SosOutcome)>,
    pub first_pass: Option<u64>,
    /// Set when a level was skipped because its basis exceeded the cap.
    pub stopped: Option<String>,
}

/// Searches `d = 1, …, dmax` for an SOS certificate of `ψ_d(p)` with
/// `p = (x²)ᵀQ(x²)`. Since `p` is even in every variable, `φ_s(p) = p` and a
/// single sign pattern suffices.
pub fn copositivity_cert(q: &SymRatMatrix, dmax: u64, opts: &SosOptions) -> Result<CopositivityReport, SosError> {
    let p = even_quadratic_form(q);
    let falsifier = (0..q.dim()).find(|&i| q.get(i, i).is_negative());
    let mut levels = Vec::new();
    let mut first_pass = None;
    let mut stopped = None;
    for d in 1..=dmax {
        let out = match sos_check(&p.psi_d(d), opts) {
            Err(e @ SosError::BasisTooLarge { .. }) => {
                stopped = Some(format!("d = {d}: {e}"));
                break;
            }
            r => r?,
        };
        let pass = out.is_sos();
        levels.push((d, out));
        if pass {
            first_pass = Some(d);
            break;
        }
    }
    Ok(CopositivityReport { q: q.clone(), p, falsifier, levels, first_pass, stopped })
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionCheck {
    /// Zero-based index `i`; variables `i` and `i+1` (mod 5) are set to zero.
    pub i: usize,
    pub restricted: String,
    pub expected: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HornReport {
    pub d: u64,
    pub restrictions: Vec<RestrictionCheck>,
    /// `H_d(1, 0, 0, 0, 0)`.
    pub value_at_e1: String,
    pub all_hold: bool,
}

/// Checks exactly that `H_d = h(x^d)` restricted to `x_i = x_{i+1} = 0`
/// equals `(x_{i+2}^d − x_{i+3}^d + x_{i+4}^d)²` for every `i`.
pub fn horn_restriction_check(d: u64) -> Result<HornReport, SosError> {
    if d == 0 {
        return Err(SosError::Invalid("d must be positive".into()));
    }
    let h = horn().psi_d(d);
    let var = |k: usize| GroupRingElement::var(5, k % 5).psi_d(d);
    let mut restrictions = Vec::new();
    for i in 0..5 {
        let restricted = h.restrict_zero(&[i, (i + 1) % 5])?;
        let expected = var(i + 2).sub(&var(i + 3))?.add(&var(i + 4))?.square();
        restrictions.push(RestrictionCheck { i, holds: restricted == expected, restricted: restricted.to_string(), expected: expected.to_string() });
    }
    let mut e1 = vec![Rat::zero(); 5];
    e1[0] = Rat::from_integer(1.into());
    let v = h.eval_rational(&e1)?;
    let all_hold = restrictions.iter().all(|r| r.holds) && v == Rat::from_integer(1.into());
    Ok(HornReport { d, restrictions, value_at_e1: fmt_rat(&v), all_hold })
}

#[derive(Clone, Debug)]
pub struct ReznickReport {
    pub circuit: CircuitReport,
    pub d: u64,
    pub sigma: SigmaReport,
}

impl ReznickReport {
    pub fn passes(&self) -> bool {
        self.sigma.verdict == Verdict::Pass
    }
}

/// For a polynomial supported on a circuit, runs the `Σ_d` test at
/// `d = max(2, n − 1)`.
pub fn sonc_reznick_pass(p: &GroupRingElement, opts: &SosOptions) -> Result<ReznickReport, SosError> {
    let circuit = circuit_detect(&SupportSet::of(p)?);
    if !circuit.is_circuit {
        return Err(SosError::NotACircuit(p.to_string()));
    }
    let d = (p.dim() as u64).saturating_sub(1).max(2);
    let sigma = sigma_d_check(p, d, opts)?;
    Ok(ReznickReport { circuit, d, sigma })
}
