use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::series::HahnSeries;
use super::HahnError;
use crate::exact::linalg::dot;
use crate::exact::rat::Rat;
use crate::groupring::Exponent;
use crate::interval::Interval;
use crate::posdef::{ExpSumFunction, FnValue, MomentFunction};

/// Working precision for coefficient values that are only known as
/// enclosures.
pub const COEF_BITS: u32 = 256;

/// A one-dimensional function used through a linear embedding `Q^n → Q`.
#[derive(Clone, Debug, PartialEq)]
pub enum Template {
    ExpSum(ExpSumFunction),
    Moment(MomentFunction),
}

impl Template {
    fn eval(&self, t: &Rat) -> FnValue {
        match self {
            Template::ExpSum(f) => f.eval(t, COEF_BITS),
            Template::Moment(m) => FnValue::Enclosure(m.eval(t, COEF_BITS)),
        }
    }
}

/// A function `f: Q^n → Q` defining `L_f(Σ c_e ε^e) = Σ f(e) c_e ε^e`.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefMap {
    /// Listed values, with `default` everywhere else.
    Table { n: usize, table: BTreeMap<Exponent, Rat>, default: Rat },
    /// `f(e) = template(⟨weights, e⟩)`.
    Template { template: Template, weights: Vec<Rat> },
    /// `e ↦ 1 / g(e)`.
    Reciprocal(Box<CoefMap>),
}

/// A coefficient value: the rational used, and a bound on its distance from
/// the true real value (zero when exact).
#[derive(Clone, Debug, PartialEq)]
pub struct CoefValue {
    pub value: Rat,
    pub radius: Rat,
}

impl CoefValue {
    pub fn interval(&self) -> Interval {
        Interval::new(&self.value - &self.radius, &self.value + &self.radius)
    }
}

impl CoefMap {
    /// The constant function one, so `L_f` is the identity.
    pub fn identity(n: usize) -> Self {
        CoefMap::Table { n, table: BTreeMap::new(), default: Rat::one() }
    }

    /// A one-dimensional template used on `Q^1`.
    pub fn univariate(template: Template) -> Self {
        CoefMap::Template { template, weights: vec![Rat::one()] }
    }

    pub fn dim(&self) -> usize {
        match self {
            CoefMap::Table { n, .. } => *n,
            CoefMap::Template { weights, .. } => weights.len(),
            CoefMap::Reciprocal(g) => g.dim(),
        }
    }

    pub fn eval(&self, e: &Exponent) -> Result<CoefValue, HahnError> {
        if e.dim() != self.dim() {
            return Err(HahnError::DimensionMismatch { left: self.dim(), right: e.dim() });
        }
        match self {
            CoefMap::Table { table, default, .. } => Ok(CoefValue { value: table.get(e).unwrap_or(default).clone(), radius: Rat::zero() }),
            CoefMap::Template { template, weights } => {
                let t = dot(weights, e.coords());
                Ok(match template.eval(&t) {
                    FnValue::Exact(v) => CoefValue { value: v, radius: Rat::zero() },
                    FnValue::Enclosure(iv) => CoefValue { value: iv.mid(), radius: iv.radius() },
                })
            }
            CoefMap::Reciprocal(g) => {
                let v = g.eval(e)?;
                let mag = v.value.abs();
                if mag <= v.radius {
                    return Err(HahnError::ZeroCoefficient(e.clone()));
                }
                // |1/x − 1/v| ≤ r / (|v|(|v| − r)) for |x − v| ≤ r.
                let radius = if v.radius.is_zero() { Rat::zero() } else { &v.radius / (&mag * (&mag - &v.radius)) };
                Ok(CoefValue { value: v.value.recip(), radius })
            }
        }
    }

    /// True when `f(0) = 1` exactly.
    pub fn is_unital(&self) -> bool {
        self.eval(&Exponent::zero(self.dim())).is_ok_and(|v| v.value.is_one() && v.radius.is_zero())
    }
}

/// `L_f`: scales each coefficient by `f` at its exponent. The cutoff is kept.
pub fn apply_lf(f: &CoefMap, a: &HahnSeries) -> Result<HahnSeries, HahnError> {
    apply_lf_with(a, |e| f.eval(e).map(|v| v.value))
}

/// `L_f` with a caller-supplied evaluator, e.g. a memoised one.
pub fn apply_lf_with(a: &HahnSeries, mut f: impl FnMut(&Exponent) -> Result<Rat, HahnError>) -> Result<HahnSeries, HahnError> {
    let mut terms = Vec::with_capacity(a.terms().len());
    for (e, c) in a.terms() {
        terms.push((e.clone(), f(e)? * c));
    }
    HahnSeries::from_terms(a.dim(), terms, a.trunc().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    fn e1(x: i64) -> Exponent {
        Exponent::from_ints(&[x])
    }

    fn series() -> HahnSeries {
        HahnSeries::from_terms(1, [(e1(-1), int(2)), (e1(0), rat(1, 3)), (e1(4), int(-5))], Some(e1(9))).unwrap()
    }

    #[test]
    fn identity_map() {
        let f = CoefMap::identity(1);
        assert!(f.is_unital());
        assert_eq!(apply_lf(&f, &series()).unwrap(), series());
    }

    #[test]
    fn reciprocal_inverts() {
        let g = CoefMap::univariate(Template::ExpSum(ExpSumFunction::f_epsilon(&[int(2), int(3)], &rat(1, 11)).unwrap()));
        let inv = CoefMap::Reciprocal(Box::new(g.clone()));
        let a = series();
        assert_eq!(apply_lf(&inv, &apply_lf(&g, &a).unwrap()).unwrap(), a);
        assert_eq!(apply_lf(&g, &apply_lf(&inv, &a).unwrap()).unwrap(), a);
    }

    #[test]
    fn moment_template_value() {
        let f = CoefMap::univariate(Template::Moment(MomentFunction::new(int(0), int(1)).unwrap()));
        assert!(f.is_unital());
        let out = apply_lf(&f, &HahnSeries::eps_pow(e1(1))).unwrap();
        let c = out.coeff(&e1(1));
        assert!(c > rat(1718281, 1_000_000) && c < rat(1718282, 1_000_000));
        assert!(f.eval(&e1(1)).unwrap().radius < rat(1, 1 << 60).pow(4));
    }

    #[test]
    fn linearity() {
        let f = CoefMap::univariate(Template::ExpSum(ExpSumFunction::exp_sum(&[int(2), rat(1, 3)]).unwrap()));
        let a = series();
        let b = HahnSeries::from_terms(1, [(e1(0), int(7)), (e1(2), int(1))], None).unwrap();
        let lhs = apply_lf(&f, &a.add(&b).unwrap().scale(&rat(3, 2))).unwrap();
        let rhs = apply_lf(&f, &a).unwrap().add(&apply_lf(&f, &b).unwrap()).unwrap().scale(&rat(3, 2));
        assert_eq!(lhs, rhs);
    }
}
