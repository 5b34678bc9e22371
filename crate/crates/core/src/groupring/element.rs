use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::exponent::Exponent;
use super::GroupRingError;
use crate::exact::rat::Rat;
use crate::interval::{pow_rat, Interval};

/// A finite sum `Σ c_a x^a` with rational exponents `a ∈ Q^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    n: usize,
    terms: BTreeMap<Exponent, Rat>,
}

/// Value of an element at a point of the positive orthant.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalValue {
    Exact(Rat),
    Enclosure(Interval),
}

impl EvalValue {
    pub fn as_interval(&self) -> Interval {
        match self {
            EvalValue::Exact(r) => Interval::point(r.clone()),
            EvalValue::Enclosure(iv) => iv.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            EvalValue::Exact(r) => Some(r),
            EvalValue::Enclosure(_) => None,
        }
    }
}

impl GroupRingElement {
    pub fn zero(n: usize) -> Self {
        GroupRingElement { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        Self::monomial(Exponent::zero(n), c)
    }

    pub fn monomial(e: Exponent, c: Rat) -> Self {
        let mut p = Self::zero(e.dim());
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn var(n: usize, i: usize) -> Self {
        Self::monomial(Exponent::unit(n, i), Rat::one())
    }

    /// Builds an element from `(coefficient, exponent)` pairs, summing repeats.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Rat, Exponent)>) -> Result<Self, GroupRingError> {
        let mut p = Self::zero(n);
        for (c, e) in terms {
            if e.dim() != n {
                return Err(GroupRingError::DimensionMismatch { left: n, right: e.dim() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Integer-exponent convenience constructor.
    pub fn from_int_terms(n: usize, terms: &[(i64, &[i64])]) -> Self {
        let mut p = Self::zero(n);
        for (c, e) in terms {
            assert_eq!(e.len(), n, "exponent dimension mismatch");
            p.add_term(Exponent::from_ints(e), Rat::from_integer(BigInt::from(*c)));
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms.keys().all(Exponent::is_integral)
    }

    fn check_dim(&self, o: &Self) -> Result<(), GroupRingError> {
        if self.n != o.n {
            return Err(GroupRingError::DimensionMismatch { left: self.n, right: o.n });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, GroupRingError> {
        self.check_dim(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, GroupRingError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        GroupRingElement { n: self.n, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, GroupRingError> {
        self.check_dim(o)?;
        let mut acc: BTreeMap<Exponent, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                *acc.entry(ea + eb).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(GroupRingElement { n: self.n, terms: acc })
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same dimension")
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::constant(self.n, Rat::one());
        for _ in 0..k {
            r = r.mul(self).expect("same dimension");
        }
        r
    }

    /// `p(x_1^d, …, x_n^d)`: every exponent multiplied by `d`.
    pub fn psi_d(&self, d: u64) -> Self {
        assert!(d >= 1, "psi_d needs d >= 1");
        self.map_exponents(|e| e.scale_int(d))
    }

    /// Inverse of `psi_d`.
    pub fn psi_d_inverse(&self, d: u64) -> Self {
        assert!(d >= 1, "psi_d needs d >= 1");
        self.map_exponents(|e| e.scale(&Rat::new(BigInt::one(), BigInt::from(d))))
    }

    fn map_exponents(&self, f: impl Fn(&Exponent) -> Exponent) -> Self {
        GroupRingElement { n: self.n, terms: self.terms.iter().map(|(e, c)| (f(e), c.clone())).collect() }
    }

    /// `p(s_1 x_1, …, s_n x_n)` for a sign vector `s`.
    pub fn phi_s(&self, s: &[i8]) -> Result<Self, GroupRingError> {
        if s.len() != self.n {
            return Err(GroupRingError::DimensionMismatch { left: self.n, right: s.len() });
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if !e.is_integral() {
                return Err(GroupRingError::FractionalExponent(e.clone()));
            }
            let flips = e
                .coords()
                .iter()
                .zip(s)
                .filter(|(a, &si)| si < 0 && a.to_integer().is_odd())
                .count();
            let c = if flips % 2 == 1 { -c.clone() } else { c.clone() };
            terms.insert(e.clone(), c);
        }
        Ok(GroupRingElement { n: self.n, terms })
    }

    /// Sets the listed variables to zero. Terms with a positive exponent in one
    /// of them vanish; terms with zero exponent there survive.
    pub fn restrict_zero(&self, vars: &[usize]) -> Result<Self, GroupRingError> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut keep = true;
            for &i in vars {
                let a = &e.coords()[i];
                if a.is_negative() {
                    return Err(GroupRingError::NegativeExponent(e.clone()));
                }
                if a.is_positive() {
                    keep = false;
                }
            }
            if keep {
                terms.insert(e.clone(), c.clone());
            }
        }
        Ok(GroupRingElement { n: self.n, terms })
    }

    /// Evaluates at a point of the positive orthant. The value is exact when
    /// every needed root `x_i^(1/q)` is rational, otherwise an enclosure whose
    /// width is about `2^-bits` per term.
    pub fn eval_positive(&self, x: &[Rat], bits: u32) -> Result<EvalValue, GroupRingError> {
        if x.len() != self.n {
            return Err(GroupRingError::DimensionMismatch { left: self.n, right: x.len() });
        }
        if let Some(i) = x.iter().position(|v| !v.is_positive()) {
            return Err(GroupRingError::NonpositivePoint(i));
        }
        let mut exact = Rat::zero();
        let mut enclosure: Option<Interval> = None;
        for (e, c) in &self.terms {
            let mut val = Interval::point(c.clone());
            let mut is_exact = true;
            for (xi, a) in x.iter().zip(e.coords()) {
                if a.is_zero() {
                    continue;
                }
                match rational_power(xi, a) {
                    Some(v) => val = val.scale(&v),
                    None => {
                        is_exact = false;
                        val = val.mul(&pow_rat(xi, a, bits + 8));
                    }
                }
            }
            if is_exact {
                exact += val.lo();
            } else {
                enclosure = Some(match enclosure {
                    None => val,
                    Some(acc) => acc.add(&val),
                });
            }
        }
        Ok(match enclosure {
            None => EvalValue::Exact(exact),
            Some(iv) => EvalValue::Enclosure(iv.add_rat(&exact)),
        })
    }

    /// Evaluates an integer-exponent element at an arbitrary rational point.
    pub fn eval_rational(&self, x: &[Rat]) -> Result<Rat, GroupRingError> {
        if x.len() != self.n {
            return Err(GroupRingError::DimensionMismatch { left: self.n, right: x.len() });
        }
        let mut s = Rat::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (xi, a) in x.iter().zip(e.coords()) {
                if !a.is_integer() {
                    return Err(GroupRingError::FractionalExponent(e.clone()));
                }
                let k: i32 = a.to_integer().try_into().map_err(|_| GroupRingError::FractionalExponent(e.clone()))?;
                if k >= 0 {
                    v *= num_traits::pow(xi.clone(), k as usize);
                } else if xi.is_zero() {
                    return Err(GroupRingError::NegativeExponent(e.clone()));
                } else {
                    v *= num_traits::pow(xi.recip(), (-k) as usize);
                }
            }
            s += v;
        }
        Ok(s)
    }

    /// Largest coordinate sum over the support.
    pub fn total_degree(&self) -> Option<Rat> {
        self.terms.keys().map(Exponent::degree).max()
    }
}

/// `x^a` when it is rational, for rational `x > 0`.
pub fn rational_power(x: &Rat, a: &Rat) -> Option<Rat> {
    let q: u32 = a.denom().try_into().ok()?;
    let p: i64 = a.numer().try_into().ok()?;
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.nth_root(q);
        if num_traits::pow(r.clone(), q as usize) == *v {
            Some(r)
        } else {
            None
        }
    };
    let base = Rat::new(root(x.numer())?, root(x.denom())?);
    let k = usize::try_from(p.unsigned_abs()).ok()?;
    let v = num_traits::pow(base, k);
    Some(if p < 0 { v.recip() } else { v })
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    fn sqrt_eps() -> GroupRingElement {
        GroupRingElement::monomial(Exponent(vec![rat(1, 2)]), int(1))
    }

    #[test]
    fn half_power_squares_to_linear() {
        let s = sqrt_eps().square();
        assert_eq!(s, GroupRingElement::var(1, 0));
    }

    #[test]
    fn additive_inverse() {
        let p = GroupRingElement::from_int_terms(2, &[(3, &[1, 0]), (-2, &[0, 5])]);
        assert!(p.add(&p.neg()).unwrap().is_zero());
    }

    #[test]
    fn binomial_square() {
        let x = GroupRingElement::var(2, 0);
        let y = GroupRingElement::var(2, 1);
        let s = x.add(&y).unwrap().square();
        let want = GroupRingElement::from_int_terms(2, &[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])]);
        assert_eq!(s, want);
    }

    #[test]
    fn dimension_mismatch() {
        let a = GroupRingElement::var(2, 0);
        let b = GroupRingElement::var(3, 0);
        assert!(matches!(a.mul(&b), Err(GroupRingError::DimensionMismatch { .. })));
    }

    #[test]
    fn substitutions() {
        let xy = GroupRingElement::from_int_terms(2, &[(1, &[1, 1])]);
        assert_eq!(xy.psi_d(2), GroupRingElement::from_int_terms(2, &[(1, &[2, 2])]));
        assert_eq!(xy.psi_d(1), xy);
        assert_eq!(xy.phi_s(&[-1, -1]).unwrap(), xy);
        let sum = GroupRingElement::from_int_terms(2, &[(1, &[1, 0]), (1, &[0, 1])]);
        let flipped = GroupRingElement::from_int_terms(2, &[(-1, &[1, 0]), (1, &[0, 1])]);
        assert_eq!(sum.phi_s(&[-1, 1]).unwrap(), flipped);
        assert_eq!(sum.phi_s(&[1, 1]).unwrap(), sum);
        assert!(matches!(sqrt_eps().phi_s(&[-1]), Err(GroupRingError::FractionalExponent(_))));
    }

    #[test]
    fn evaluation() {
        let v = sqrt_eps().eval_positive(&[int(4)], 64).unwrap();
        assert_eq!(v, EvalValue::Exact(int(2)));
        let v = sqrt_eps().eval_positive(&[int(2)], 64).unwrap();
        let iv = v.as_interval();
        assert!(iv.lo() < &rat(141422, 100000) && iv.hi() > &rat(141421, 100000));
        assert!(iv.width() < rat(1, 1 << 40));
        assert!(matches!(sqrt_eps().eval_positive(&[int(0)], 64), Err(GroupRingError::NonpositivePoint(0))));
        assert_eq!(rational_power(&rat(8, 27), &rat(-2, 3)), Some(rat(9, 4)));
    }
}
