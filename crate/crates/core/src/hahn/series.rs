use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::HahnError;
use crate::exact::rat::{fmt_rat, Rat};
use crate::groupring::{rational_power, Exponent};

/// Upper bound on the number of terms of a geometric or binomial expansion
/// before giving up on reaching the requested cutoff.
const MAX_EXPANSION_TERMS: usize = 512;

/// A truncated Hahn series `Σ c_e ε^e` over the lex-ordered group `Q^n`.
///
/// `trunc = Some(t)` means every coefficient below `t` is known exactly and
/// nothing is known at or above `t`. `trunc = None` means the series is an
/// exact finite sum.
#[derive(Clone, PartialEq, Eq)]
pub struct HahnSeries {
    n: usize,
    terms: Vec<(Exponent, Rat)>,
    trunc: Option<Exponent>,
}

/// Valuation of a series: its smallest exponent, or infinity for zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(Exponent),
    Infinity,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Exponent> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinity => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
            (Valuation::Infinity, _) => Ordering::Greater,
            (_, Valuation::Infinity) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        })
    }
}

fn min_opt(a: Option<Exponent>, b: Option<Exponent>) -> Option<Exponent> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn add_opt(a: Option<&Exponent>, b: Option<&Exponent>) -> Option<Exponent> {
    Some(a? + b?)
}

impl HahnSeries {
    pub fn zero(n: usize) -> Self {
        HahnSeries { n, terms: Vec::new(), trunc: None }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        Self::monomial(Exponent::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rat::one())
    }

    pub fn monomial(e: Exponent, c: Rat) -> Self {
        let n = e.dim();
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        HahnSeries { n, terms, trunc: None }
    }

    /// `ε^e` with coefficient one.
    pub fn eps_pow(e: Exponent) -> Self {
        Self::monomial(e, Rat::one())
    }

    /// Builds a series from arbitrary terms, merging repeats and dropping
    /// terms at or above `trunc`.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exponent, Rat)>, trunc: Option<Exponent>) -> Result<Self, HahnError> {
        let mut acc: BTreeMap<Exponent, Rat> = BTreeMap::new();
        for (e, c) in terms {
            if e.dim() != n {
                return Err(HahnError::DimensionMismatch { left: n, right: e.dim() });
            }
            *acc.entry(e).or_insert_with(Rat::zero) += c;
        }
        if let Some(t) = &trunc {
            if t.dim() != n {
                return Err(HahnError::DimensionMismatch { left: n, right: t.dim() });
            }
        }
        Ok(Self::from_map(n, acc, trunc))
    }

    fn from_map(n: usize, acc: BTreeMap<Exponent, Rat>, trunc: Option<Exponent>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && trunc.as_ref().is_none_or(|t| e < t))
            .collect();
        HahnSeries { n, terms, trunc }
    }

    /// Forgets everything at or above `t`.
    pub fn truncate(&self, t: &Exponent) -> Self {
        let trunc = min_opt(self.trunc.clone(), Some(t.clone()));
        let terms = self.terms.iter().filter(|(e, _)| e < trunc.as_ref().unwrap()).cloned().collect();
        HahnSeries { n: self.n, terms, trunc }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Exponent, Rat)] {
        &self.terms
    }

    pub fn trunc(&self) -> Option<&Exponent> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// True when no term below the cutoff is nonzero.
    pub fn is_zero_to_trunc(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the exactly known zero series.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn coeff(&self, e: &Exponent) -> Rat {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(e))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rat::zero())
    }

    pub fn leading(&self) -> Option<(&Exponent, &Rat)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Finite(e.clone()),
            None => Valuation::Infinity,
        }
    }

    /// Lowest exponent at which the series can be nonzero: the valuation, or
    /// the cutoff for a series that is zero up to truncation.
    fn low(&self) -> Option<&Exponent> {
        self.terms.first().map(|(e, _)| e).or(self.trunc.as_ref())
    }

    /// Sign of the leading coefficient; `0` for a series that is zero up to
    /// its cutoff.
    pub fn sign(&self) -> i8 {
        match self.terms.first() {
            Some((_, c)) if c.is_positive() => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    /// Sign of `self - other`.
    pub fn compare(&self, other: &Self) -> Result<i8, HahnError> {
        Ok(self.sub(other)?.sign())
    }

    /// Coefficient of `ε^0`, defined on the valuation ring.
    pub fn residue(&self) -> Result<Rat, HahnError> {
        let zero = Exponent::zero(self.n);
        if let Some((e, _)) = self.terms.first() {
            if e < &zero {
                return Err(HahnError::NegativeValuation(e.clone()));
            }
        }
        if self.trunc.as_ref().is_some_and(|t| t <= &zero) {
            return Err(HahnError::TruncationExhausted(format!(
                "constant coefficient lies beyond cutoff {}",
                self.trunc.as_ref().unwrap()
            )));
        }
        Ok(self.coeff(&zero))
    }

    fn check_dim(&self, o: &Self) -> Result<(), HahnError> {
        if self.n != o.n {
            return Err(HahnError::DimensionMismatch { left: self.n, right: o.n });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, HahnError> {
        self.check_dim(o)?;
        let mut acc: BTreeMap<Exponent, Rat> = self.terms.iter().cloned().collect();
        for (e, c) in &o.terms {
            *acc.entry(e.clone()).or_insert_with(Rat::zero) += c;
        }
        Ok(Self::from_map(self.n, acc, min_opt(self.trunc.clone(), o.trunc.clone())))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, o: &Self) -> Result<Self, HahnError> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return HahnSeries { n: self.n, terms: Vec::new(), trunc: self.trunc.clone() };
        }
        HahnSeries {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Multiplies by the monomial `ε^e`.
    pub fn shift(&self, e: &Exponent) -> Self {
        HahnSeries {
            n: self.n,
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            trunc: self.trunc.as_ref().map(|t| t + e),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, HahnError> {
        self.check_dim(o)?;
        if self.is_exact_zero() || o.is_exact_zero() {
            return Ok(Self::zero(self.n));
        }
        // a = A + O(ε^ta), b = B + O(ε^tb): the product is known below
        // min(ta + low(b), tb + low(a)).
        let t1 = add_opt(self.trunc.as_ref(), o.low());
        let t2 = add_opt(o.trunc.as_ref(), self.low());
        let trunc = match (self.trunc.is_some(), o.trunc.is_some()) {
            (false, false) => None,
            (true, false) => t1,
            (false, true) => t2,
            (true, true) => min_opt(t1, t2),
        };
        let mut acc: BTreeMap<Exponent, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea + eb;
                if trunc.as_ref().is_some_and(|t| &e >= t) {
                    continue;
                }
                *acc.entry(e).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        Ok(Self::from_map(self.n, acc, trunc))
    }

    /// `self = c·ε^v·(1 + h)` with `v(h) > 0`; returns `(c, v, h)`.
    fn normalize(&self) -> Option<(Rat, Exponent, HahnSeries)> {
        let (v, c) = self.leading()?;
        let (v, c) = (v.clone(), c.clone());
        let h = HahnSeries {
            n: self.n,
            terms: self.terms[1..].iter().map(|(e, x)| (e - &v, x / &c)).collect(),
            trunc: self.trunc.as_ref().map(|t| t - &v),
        };
        Some((c, v, h))
    }

    /// Sums `Σ_k coef(k) h^k` for `v(h) > 0`, keeping terms below `cut`.
    fn power_series(h: &HahnSeries, cut: &Exponent, coef: impl Fn(usize) -> Rat) -> Result<HahnSeries, HahnError> {
        let n = h.n;
        let mut sum = HahnSeries::one(n).scale(&coef(0)).truncate(cut);
        if h.is_exact_zero() {
            return Ok(sum);
        }
        let mut power = HahnSeries::one(n);
        for k in 1..=MAX_EXPANSION_TERMS {
            power = power.mul(h)?.truncate(cut);
            if power.is_zero_to_trunc() && power.trunc.as_ref().is_none_or(|t| t >= cut) {
                return Ok(sum);
            }
            sum = sum.add(&power.scale(&coef(k)))?;
        }
        Err(HahnError::TruncationExhausted(format!(
            "expansion did not reach cutoff {cut} within {MAX_EXPANSION_TERMS} terms"
        )))
    }

    /// Multiplicative inverse, correct below `min(cutoff, trunc - 2·v)`.
    pub fn inverse(&self, cutoff: &Exponent) -> Result<Self, HahnError> {
        let Some((c, v, h)) = self.normalize() else {
            return Err(HahnError::DivisionByZero);
        };
        let neg_v = -&v;
        // Relative cutoff for 1/(1+h): the final shift is by -v.
        let rel_cut = min_opt(Some(cutoff + &v), h.trunc.clone()).unwrap();
        let geo = Self::power_series(&h, &rel_cut, |k| if k % 2 == 0 { Rat::one() } else { -Rat::one() })?;
        let exact = h.trunc.is_none() && geo.terms.len() == 1 && h.is_exact_zero();
        let mut out = geo.scale(&c.recip()).shift(&neg_v);
        if exact {
            out.trunc = None;
        }
        Ok(out)
    }

    /// Nonnegative square root, correct below `min(cutoff, trunc - v/2)`.
    pub fn sqrt_nonneg(&self, cutoff: &Exponent) -> Result<Self, HahnError> {
        if self.sign() < 0 {
            return Err(HahnError::NegativeElement);
        }
        let Some((c, v, h)) = self.normalize() else {
            // Zero up to the cutoff: the root is small of half the order.
            return Ok(HahnSeries {
                n: self.n,
                terms: Vec::new(),
                trunc: self.trunc.as_ref().map(|t| t.scale(&Rat::new(BigInt::one(), BigInt::from(2)))),
            });
        };
        let root_c = rational_power(&c, &Rat::new(BigInt::one(), BigInt::from(2)))
            .ok_or_else(|| HahnError::IrrationalRoot(fmt_rat(&c)))?;
        let half_v = v.scale(&Rat::new(BigInt::one(), BigInt::from(2)));
        let rel_cut = min_opt(Some(cutoff - &half_v), h.trunc.clone()).unwrap();
        // Binomial coefficients of (1+h)^(1/2).
        let binom = |k: usize| {
            let mut b = Rat::one();
            let half = Rat::new(BigInt::one(), BigInt::from(2));
            for j in 0..k {
                b = b * (&half - Rat::from_integer(BigInt::from(j))) / Rat::from_integer(BigInt::from(j + 1));
            }
            b
        };
        let series = Self::power_series(&h, &rel_cut, binom)?;
        let mut out = series.scale(&root_c).shift(&half_v);
        if h.is_exact_zero() {
            out.trunc = None;
        }
        Ok(out)
    }

    /// Positive integer power.
    pub fn powi(&self, k: u32) -> Result<Self, HahnError> {
        let mut r = Self::one(self.n);
        for _ in 0..k {
            r = r.mul(self)?;
        }
        Ok(r)
    }
}

impl fmt::Debug for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                if e.is_zero() {
                    fmt_rat(c)
                } else {
                    format!("{}·ε^{}", fmt_rat(c), e)
                }
            })
            .collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some(t) = &self.trunc {
            parts.push(format!("O(ε^{t})"));
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => out.push_str(&format!(" - {rest}")),
                None => out.push_str(&format!(" + {p}")),
            }
        }
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    fn e1(x: Rat) -> Exponent {
        Exponent(vec![x])
    }

    fn eps(x: Rat) -> HahnSeries {
        HahnSeries::eps_pow(e1(x))
    }

    #[test]
    fn monomial_product() {
        let p = eps(rat(1, 2)).mul(&eps(rat(1, 3))).unwrap();
        assert_eq!(p, eps(rat(5, 6)));
        assert_eq!(p.valuation(), Valuation::Finite(e1(rat(5, 6))));
    }

    #[test]
    fn geometric_inverse() {
        let a = HahnSeries::one(1).add(&eps(int(1))).unwrap();
        let inv = a.inverse(&e1(int(6))).unwrap();
        assert_eq!(inv.trunc(), Some(&e1(int(6))));
        assert_eq!(inv.terms().len(), 6);
        let prod = a.mul(&inv).unwrap();
        assert_eq!(prod.terms(), HahnSeries::one(1).terms());
        assert_eq!(prod.trunc(), Some(&e1(int(6))));
        assert!(matches!(HahnSeries::zero(1).inverse(&e1(int(1))), Err(HahnError::DivisionByZero)));
        let m = eps(int(3)).scale(&int(2)).inverse(&e1(int(0))).unwrap();
        assert_eq!(m, eps(int(-3)).scale(&rat(1, 2)));
    }

    #[test]
    fn valuation_of_sum_and_sign() {
        let s = eps(int(1)).add(&eps(int(2))).unwrap();
        assert_eq!(s.valuation(), Valuation::Finite(e1(int(1))));
        assert_eq!(HahnSeries::one(1).sub(&eps(int(1))).unwrap().sign(), 1);
        assert_eq!(eps(int(1)).neg().add(&eps(int(2))).unwrap().sign(), -1);
        assert_eq!(HahnSeries::zero(1).sign(), 0);
    }

    #[test]
    fn square_roots() {
        assert_eq!(eps(int(2)).sqrt_nonneg(&e1(int(10))).unwrap(), eps(int(1)));
        assert_eq!(HahnSeries::constant(1, int(4)).sqrt_nonneg(&e1(int(3))).unwrap(), HahnSeries::constant(1, int(2)));
        let a = HahnSeries::one(1).add(&eps(int(1)).scale(&int(2))).unwrap();
        let b = a.sqrt_nonneg(&e1(int(5))).unwrap();
        assert_eq!(b.coeff(&e1(int(1))), int(1));
        assert_eq!(b.coeff(&e1(int(2))), rat(-1, 2));
        let sq = b.mul(&b).unwrap();
        assert_eq!(sq.terms(), a.terms());
        assert!(matches!(eps(int(1)).neg().sqrt_nonneg(&e1(int(3))), Err(HahnError::NegativeElement)));
        assert!(matches!(HahnSeries::constant(1, int(2)).sqrt_nonneg(&e1(int(3))), Err(HahnError::IrrationalRoot(_))));
    }

    #[test]
    fn residues() {
        let a = HahnSeries::one(1).add(&eps(int(1))).unwrap();
        assert_eq!(a.residue().unwrap(), int(1));
        assert_eq!(eps(int(1)).residue().unwrap(), int(0));
        let b = HahnSeries::constant(1, rat(3, 2)).add(&eps(rat(1, 3)).scale(&int(5))).unwrap();
        assert_eq!(b.residue().unwrap(), rat(3, 2));
        assert!(matches!(eps(int(-1)).residue(), Err(HahnError::NegativeValuation(_))));
    }

    #[test]
    fn truncation_propagates_through_products() {
        let a = HahnSeries::from_terms(1, [(e1(int(0)), int(1))], Some(e1(int(3)))).unwrap();
        let b = eps(int(2));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.trunc(), Some(&e1(int(5))));
        let z = HahnSeries::from_terms(1, [], Some(e1(int(1)))).unwrap();
        let q = z.mul(&eps(int(-4))).unwrap();
        assert_eq!(q.trunc(), Some(&e1(int(-3))));
        assert_eq!(q.sign(), 0);
    }

    #[test]
    fn lex_inverse_can_exhaust() {
        // v(h) = (0,1) never reaches a cutoff at (1,0) in lex order.
        let h = HahnSeries::eps_pow(Exponent::from_ints(&[0, 1]));
        let a = HahnSeries::one(2).add(&h).unwrap();
        assert!(matches!(a.inverse(&Exponent::from_ints(&[1, 0])), Err(HahnError::TruncationExhausted(_))));
        assert!(a.inverse(&Exponent::from_ints(&[0, 5])).is_ok());
    }
}
