use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SosError;
use crate::exact::rat::{fmt_rat, parse_rat, Rat};
use crate::exact::{psd_check, PsdStatus, SymRatMatrix};
use crate::groupring::{ElementJson, Exponent, GroupRingElement, SupportSet};

fn add_points(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Linear equations matching Gram entries to target coefficients.
///
/// Basis elements are grouped into classes by the parity of the coordinates
/// in which the target is even. A Gram matrix can be averaged over those
/// sign flips, so entries between different classes are fixed to zero and
/// only sums of same-class pairs get an equation.
#[derive(Clone, Debug)]
pub struct GramProblem {
    pub target: GroupRingElement,
    pub basis: SupportSet,
    /// Basis indices of each parity class.
    pub classes: Vec<Vec<usize>>,
    /// Exponents `α` with an equation, sorted.
    pub alphas: Vec<Vec<i64>>,
    /// For each `α`, the pairs `(i, j)` with `i ≤ j`, same class, and
    /// `β_i + β_j = α`.
    pub pairs: Vec<Vec<(usize, usize)>>,
    /// `coeff_α(target)` for each equation.
    pub rhs: Vec<Rat>,
    /// Target exponents that no same-class pair reaches.
    pub unreachable: Vec<Vec<i64>>,
}

impl GramProblem {
    pub fn new(target: &GroupRingElement, basis: &SupportSet) -> Result<Self, SosError> {
        let n = target.dim();
        if basis.n != n {
            return Err(SosError::DimensionMismatch { left: n, right: basis.n });
        }
        let mut coeffs: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        for (e, c) in target.terms() {
            let v = e.to_i64s().ok_or_else(|| SosError::FractionalExponent(e.to_string()))?;
            coeffs.insert(v, c.clone());
        }
        let even: Vec<bool> = (0..n).map(|i| coeffs.keys().all(|a| a[i] % 2 == 0)).collect();
        let parity = |p: &[i64]| -> Vec<i64> { p.iter().zip(&even).map(|(x, e)| if *e { x.rem_euclid(2) } else { 0 }).collect() };
        let mut class_of: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (i, p) in basis.points.iter().enumerate() {
            class_of.entry(parity(p)).or_default().push(i);
        }
        let classes: Vec<Vec<usize>> = class_of.into_values().collect();
        let mut by_alpha: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
        for class in &classes {
            for (a, &i) in class.iter().enumerate() {
                for &j in &class[a..] {
                    by_alpha.entry(add_points(&basis.points[i], &basis.points[j])).or_default().push((i, j));
                }
            }
        }
        let unreachable = coeffs.keys().filter(|a| !by_alpha.contains_key(*a)).cloned().collect();
        let mut alphas = Vec::new();
        let mut pairs = Vec::new();
        let mut rhs = Vec::new();
        for (a, ps) in by_alpha {
            rhs.push(coeffs.get(&a).cloned().unwrap_or_else(Rat::zero));
            alphas.push(a);
            pairs.push(ps);
        }
        Ok(GramProblem { target: target.clone(), basis: basis.clone(), classes, alphas, pairs, rhs, unreachable })
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }
}

/// `Σ_{β,γ} G[β][γ] x^{β+γ}`.
pub fn gram_polynomial(basis: &SupportSet, g: &SymRatMatrix) -> GroupRingElement {
    let mut out = GroupRingElement::zero(basis.n);
    for (i, bi) in basis.points.iter().enumerate() {
        for (j, bj) in basis.points.iter().enumerate() {
            let v = g.get(i, j);
            if !v.is_zero() {
                out.add_term(Exponent::from_ints(&add_points(bi, bj)), v.clone());
            }
        }
    }
    out
}

/// The moment matrix `M(y)[β][γ] = y[β+γ]`; missing moments are errors.
pub fn moment_matrix(basis: &SupportSet, y: &BTreeMap<Vec<i64>, Rat>) -> Result<SymRatMatrix, SosError> {
    let m = basis.len();
    let mut rows = vec![vec![Rat::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let a = add_points(&basis.points[i], &basis.points[j]);
            let v = y.get(&a).ok_or_else(|| SosError::MissingMoment(format!("{a:?}")))?;
            rows[i][j] = v.clone();
            rows[j][i] = v.clone();
        }
    }
    Ok(SymRatMatrix::from_rows(rows).expect("symmetric by construction"))
}

/// A sum-of-squares certificate: a PSD Gram matrix reproducing the target.
#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub target: GroupRingElement,
    pub basis: SupportSet,
    pub gram: SymRatMatrix,
    pub psd: PsdStatus,
}

impl SosCertificate {
    /// Exact re-check: zero residual and a PSD Gram matrix.
    pub fn verify(&self) -> Result<(), SosError> {
        if self.gram.dim() != self.basis.len() {
            return Err(SosError::Invalid("Gram size does not match the basis".into()));
        }
        let residual = gram_polynomial(&self.basis, &self.gram).sub(&self.target)?;
        if !residual.is_zero() {
            return Err(SosError::Invalid(format!("nonzero residual {residual}")));
        }
        let v = psd_check(&self.gram);
        if !v.status.is_psd() {
            return Err(SosError::Invalid("Gram matrix is not positive semidefinite".into()));
        }
        if v.status != self.psd {
            return Err(SosError::Invalid("recorded PSD status differs".into()));
        }
        Ok(())
    }

    /// An explicit decomposition `Σ d_k (l_kᵀ v)²` from the LDLᵀ pivots.
    pub fn squares(&self) -> Vec<(Rat, GroupRingElement)> {
        ldl_squares(&self.basis, &self.gram)
    }
}

/// Splits `vᵀGv` into weighted squares by symmetric Gaussian elimination.
pub fn ldl_squares(basis: &SupportSet, g: &SymRatMatrix) -> Vec<(Rat, GroupRingElement)> {
    let m = g.dim();
    let mut a = g.rows();
    let mut out = Vec::new();
    let mut done = vec![false; m];
    loop {
        let Some(p) = (0..m).filter(|&i| !done[i] && a[i][i].is_positive()).max_by(|&i, &j| a[i][i].cmp(&a[j][j])) else { break };
        let d = a[p][p].clone();
        let row: Vec<Rat> = a[p].iter().map(|x| x / &d).collect();
        let mut q = GroupRingElement::zero(basis.n);
        for (k, c) in row.iter().enumerate() {
            if !c.is_zero() {
                q.add_term(Exponent::from_ints(&basis.points[k]), c.clone());
            }
        }
        for i in 0..m {
            for j in 0..m {
                if !row[i].is_zero() && !row[j].is_zero() {
                    let t = &d * &row[i] * &row[j];
                    a[i][j] -= t;
                }
            }
        }
        done[p] = true;
        out.push((d, q));
    }
    out
}

/// A linear functional `y` on `T2 + T2` that is nonnegative on squares
/// (its moment matrix is PSD) and negative on the target.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    pub target: GroupRingElement,
    pub basis: SupportSet,
    pub y: BTreeMap<Vec<i64>, Rat>,
    pub moment: SymRatMatrix,
    pub value: Rat,
    /// The moment fixed to one: `2β₀` for the lex-smallest basis element.
    pub normalized_at: Vec<i64>,
}

impl DualCertificate {
    pub fn pairing(target: &GroupRingElement, y: &BTreeMap<Vec<i64>, Rat>) -> Result<Rat, SosError> {
        let mut s = Rat::zero();
        for (e, c) in target.terms() {
            let a = e.to_i64s().ok_or_else(|| SosError::FractionalExponent(e.to_string()))?;
            let v = y.get(&a).ok_or_else(|| SosError::MissingMoment(format!("{a:?}")))?;
            s += c * v;
        }
        Ok(s)
    }

    /// Exact re-check: PSD moment matrix, negative value, normalisation.
    pub fn verify(&self) -> Result<(), SosError> {
        let m = moment_matrix(&self.basis, &self.y)?;
        if m != self.moment {
            return Err(SosError::Invalid("moment matrix does not match y".into()));
        }
        if !psd_check(&m).status.is_psd() {
            return Err(SosError::Invalid("moment matrix is not positive semidefinite".into()));
        }
        let v = Self::pairing(&self.target, &self.y)?;
        if v != self.value || !v.is_negative() {
            return Err(SosError::Invalid(format!("pairing {} is not the recorded negative value", fmt_rat(&v))));
        }
        if self.y.get(&self.normalized_at).is_none_or(|x| !x.is_one()) {
            return Err(SosError::Invalid("normalising moment is not one".into()));
        }
        Ok(())
    }
}

/// Outcome of a single SOS test.
#[derive(Clone, Debug)]
pub enum SosOutcome {
    Sos(Box<SosCertificate>),
    NotSos(Box<DualCertificate>),
    Inconclusive(Diagnostics),
}

impl SosOutcome {
    pub fn is_sos(&self) -> bool {
        matches!(self, SosOutcome::Sos(_))
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, SosOutcome::NotSos(_))
    }

    pub fn certificate(&self) -> Option<Certificate> {
        match self {
            SosOutcome::Sos(c) => Some(Certificate::Sos((**c).clone())),
            SosOutcome::NotSos(c) => Some(Certificate::Dual((**c).clone())),
            SosOutcome::Inconclusive(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub basis_size: usize,
    pub equations: usize,
    pub sdp_iterations: usize,
    /// Numeric optimum of `max t` with `G − tI ⪰ 0`.
    pub min_eigenvalue_bound: f64,
    pub tried_bits: Vec<u32>,
    pub note: String,
}

/// Either certificate, for storage and independent checking.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Sos(SosCertificate),
    Dual(DualCertificate),
}

impl Certificate {
    pub fn verify(&self) -> Result<(), SosError> {
        match self {
            Certificate::Sos(c) => c.verify(),
            Certificate::Dual(c) => c.verify(),
        }
    }

    pub fn target(&self) -> &GroupRingElement {
        match self {
            Certificate::Sos(c) => &c.target,
            Certificate::Dual(c) => &c.target,
        }
    }

    pub fn to_json(&self) -> CertificateJson {
        match self {
            Certificate::Sos(c) => CertificateJson::Sos {
                target: c.target.to_json(),
                basis: c.basis.points.clone(),
                gram: c.gram.rows().iter().map(|r| r.iter().map(fmt_rat).collect()).collect(),
            },
            Certificate::Dual(c) => CertificateJson::Dual {
                target: c.target.to_json(),
                basis: c.basis.points.clone(),
                moments: c.y.iter().map(|(a, v)| MomentJson { exp: a.clone(), value: fmt_rat(v) }).collect(),
                normalized_at: c.normalized_at.clone(),
                value: fmt_rat(&c.value),
            },
        }
    }

    /// Rebuilds a certificate from JSON, recomputing derived fields exactly.
    pub fn from_json(j: &CertificateJson) -> Result<Self, SosError> {
        let p = |s: &str| parse_rat(s).map_err(|e| SosError::Json(e.to_string()));
        match j {
            CertificateJson::Sos { target, basis, gram } => {
                let target = GroupRingElement::from_json(target)?;
                let basis = SupportSet::new(target.dim(), basis.clone())?;
                let rows = gram.iter().map(|r| r.iter().map(|s| p(s)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
                let gram = SymRatMatrix::from_rows(rows).map_err(|e| SosError::Json(e.to_string()))?;
                let psd = psd_check(&gram).status;
                Ok(Certificate::Sos(SosCertificate { target, basis, gram, psd }))
            }
            CertificateJson::Dual { target, basis, moments, normalized_at, value } => {
                let target = GroupRingElement::from_json(target)?;
                let basis = SupportSet::new(target.dim(), basis.clone())?;
                let y = moments.iter().map(|m| Ok((m.exp.clone(), p(&m.value)?))).collect::<Result<BTreeMap<_, _>, SosError>>()?;
                let moment = moment_matrix(&basis, &y)?;
                Ok(Certificate::Dual(DualCertificate { target, basis, y, moment, value: p(value)?, normalized_at: normalized_at.clone() }))
            }
        }
    }

    pub fn parse(src: &str) -> Result<Self, SosError> {
        let j: CertificateJson = serde_json::from_str(src).map_err(|e| SosError::Json(e.to_string()))?;
        Self::from_json(&j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentJson {
    pub exp: Vec<i64>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CertificateJson {
    Sos { target: ElementJson, basis: Vec<Vec<i64>>, gram: Vec<Vec<String>> },
    Dual { target: ElementJson, basis: Vec<Vec<i64>>, moments: Vec<MomentJson>, normalized_at: Vec<i64>, value: String },
}
