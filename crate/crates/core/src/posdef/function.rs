use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::PosdefError;
use crate::exact::rat::{fmt_rat, parse_rat, Rat};
use crate::groupring::rational_power;
use crate::interval::{exp_rat, ln_rat, pow_rat, Interval};

/// `f(x) = Σ c_m · b_m^x + c_0` with rational coefficients and distinct
/// positive rational bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpSumFunction {
    atoms: Vec<(Rat, Rat)>,
    constant: Rat,
}

/// Value of a function at a point: exact, or a certified enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum FnValue {
    Exact(Rat),
    Enclosure(Interval),
}

impl FnValue {
    pub fn interval(&self) -> Interval {
        match self {
            FnValue::Exact(r) => Interval::point(r.clone()),
            FnValue::Enclosure(iv) => iv.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            FnValue::Exact(r) => Some(r),
            FnValue::Enclosure(_) => None,
        }
    }
}

impl ExpSumFunction {
    pub fn new(atoms: Vec<(Rat, Rat)>, constant: Rat) -> Result<Self, PosdefError> {
        let mut atoms: Vec<(Rat, Rat)> = atoms.into_iter().filter(|(c, _)| !c.is_zero()).collect();
        for (_, b) in &atoms {
            if !b.is_positive() {
                return Err(PosdefError::InvalidBase(fmt_rat(b)));
            }
        }
        atoms.sort_by(|x, y| x.1.cmp(&y.1));
        if atoms.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err(PosdefError::RepeatedBase);
        }
        // A base of one is a constant in disguise.
        let mut constant = constant;
        atoms.retain(|(c, b)| {
            if b.is_one() {
                constant += c;
                false
            } else {
                true
            }
        });
        Ok(ExpSumFunction { atoms, constant })
    }

    pub fn constant_fn(c: Rat) -> Self {
        ExpSumFunction { atoms: Vec::new(), constant: c }
    }

    /// `g(x) = Σ b_m^x`.
    pub fn exp_sum(bases: &[Rat]) -> Result<Self, PosdefError> {
        Self::new(bases.iter().map(|b| (Rat::one(), b.clone())).collect(), Rat::zero())
    }

    /// `f_ε = g + ḡ − ε` with `g(x) = Σ b_m^x` and `ḡ(x) = g(−x)`.
    pub fn f_epsilon(bases: &[Rat], eps: &Rat) -> Result<Self, PosdefError> {
        let mut atoms = Vec::new();
        for b in bases {
            atoms.push((Rat::one(), b.clone()));
            atoms.push((Rat::one(), b.recip()));
        }
        Self::new(atoms, -eps.clone())
    }

    pub fn atoms(&self) -> &[(Rat, Rat)] {
        &self.atoms
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.atoms.iter().map(|(c, b)| (c.clone(), b.recip())).collect(), self.constant.clone()).expect("reflection keeps bases valid")
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        for (c, b) in &o.atoms {
            match atoms.iter_mut().find(|(_, x)| x == b) {
                Some(slot) => slot.0 += c,
                None => atoms.push((c.clone(), b.clone())),
            }
        }
        Self::new(atoms, &self.constant + &o.constant).expect("sum keeps bases valid")
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::new(self.atoms.iter().map(|(c, b)| (c * s, b.clone())).collect(), &self.constant * s).expect("scaling keeps bases valid")
    }

    /// Exact value at an integer point.
    pub fn eval_int(&self, x: i64) -> Rat {
        let mut s = self.constant.clone();
        for (c, b) in &self.atoms {
            let p = if x >= 0 {
                num_traits::pow(b.clone(), x as usize)
            } else {
                num_traits::pow(b.recip(), x.unsigned_abs() as usize)
            };
            s += c * p;
        }
        s
    }

    /// Value at a rational point; exact whenever every `b_m^x` is rational.
    pub fn eval(&self, x: &Rat, bits: u32) -> FnValue {
        let mut exact = self.constant.clone();
        let mut enclosure: Option<Interval> = None;
        for (c, b) in &self.atoms {
            match rational_power(b, x) {
                Some(v) => exact += c * v,
                None => {
                    let v = pow_rat(b, x, bits + 8).scale(c);
                    enclosure = Some(enclosure.map_or(v.clone(), |e| e.add(&v)));
                }
            }
        }
        match enclosure {
            None => FnValue::Exact(exact),
            Some(iv) => FnValue::Enclosure(iv.add_rat(&exact)),
        }
    }

    /// Enclosure of the `r`-th derivative `Σ c_m (ln b_m)^r b_m^x` at `x`,
    /// plus the constant when `r = 0`.
    pub fn derivative(&self, r: u32, x: &Rat, bits: u32) -> Interval {
        let work = bits + 8 + 4 * r;
        let mut acc = if r == 0 { Interval::point(self.constant.clone()) } else { Interval::zero() };
        for (c, b) in &self.atoms {
            let l = ln_rat(b, work).powi(r);
            let bx = match rational_power(b, x) {
                Some(v) => Interval::point(v),
                None => pow_rat(b, x, work),
            };
            acc = acc.add(&l.mul(&bx).scale(c)).round_out(work);
        }
        acc
    }

    pub fn to_json(&self) -> ExpSumJson {
        ExpSumJson {
            atoms: self.atoms.iter().map(|(c, b)| [fmt_rat(c), fmt_rat(b)]).collect(),
            constant: fmt_rat(&self.constant),
        }
    }

    pub fn from_json(j: &ExpSumJson) -> Result<Self, PosdefError> {
        let p = |s: &str| parse_rat(&s.replace('\u{2212}', "-")).map_err(|e| PosdefError::Json(e.to_string()));
        let atoms = j.atoms.iter().map(|[c, b]| Ok((p(c)?, p(b)?))).collect::<Result<Vec<_>, PosdefError>>()?;
        Self::new(atoms, p(&j.constant)?)
    }

    pub fn parse_json(src: &str) -> Result<Self, PosdefError> {
        let j: ExpSumJson = serde_json::from_str(src).map_err(|e| PosdefError::Json(e.to_string()))?;
        Self::from_json(&j)
    }
}

/// JSON form `{"atoms":[["c","b"],…],"const":"-1/11"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumJson {
    pub atoms: Vec<[String; 2]>,
    #[serde(rename = "const")]
    pub constant: String,
}

/// `f(c) = ∫_a^b e^{cx} dx`, a positive definite function on `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentFunction {
    a: Rat,
    b: Rat,
}

impl MomentFunction {
    pub fn new(a: Rat, b: Rat) -> Result<Self, PosdefError> {
        if a >= b {
            return Err(PosdefError::EmptyInterval);
        }
        Ok(MomentFunction { a, b })
    }

    pub fn bounds(&self) -> (&Rat, &Rat) {
        (&self.a, &self.b)
    }

    /// Enclosure of `f(c)` with absolute width about `2^-bits`.
    pub fn eval(&self, c: &Rat, bits: u32) -> Interval {
        if c.is_zero() {
            return Interval::point(&self.b - &self.a);
        }
        // Cancellation in the difference costs about log2(1/|c|) bits.
        let loss = (BigInt::from(c.denom().bits()) - BigInt::from(c.numer().bits())).max(BigInt::zero());
        let extra: u32 = u32::try_from(loss).unwrap_or(1024) + 16;
        let hi = exp_rat(&(c * &self.b), bits + extra);
        let lo = exp_rat(&(c * &self.a), bits + extra);
        let diff = hi.sub(&lo);
        diff.div(&Interval::point(c.clone())).expect("nonzero divisor").round_out(bits + 4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    #[test]
    fn karlin_values() {
        let f = ExpSumFunction::f_epsilon(&[int(2), int(3)], &rat(1, 11)).unwrap();
        assert_eq!(f.eval_int(0), rat(43, 11));
        assert_eq!(f.eval_int(3), f.eval_int(-3));
        assert_eq!(f.eval(&int(10), 64), FnValue::Exact(f.eval_int(10)));
        assert_eq!(f.reflect(), f);
    }

    #[test]
    fn json_roundtrip_with_unicode_minus() {
        let src = r#"{"atoms":[["1","2"],["1","3"],["1","1/2"],["1","1/3"]],"const":"−1/11"}"#;
        let f = ExpSumFunction::parse_json(src).unwrap();
        assert_eq!(f, ExpSumFunction::f_epsilon(&[int(2), int(3)], &rat(1, 11)).unwrap());
        let back = ExpSumFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert!(ExpSumFunction::parse_json(r#"{"atoms":[["1","-2"]],"const":"0"}"#).is_err());
        assert!(ExpSumFunction::parse_json(r#"{"atoms":[["1","2"],["3","2"]],"const":"0"}"#).is_err());
    }

    #[test]
    fn irrational_points_are_enclosed() {
        let f = ExpSumFunction::exp_sum(&[int(2)]).unwrap();
        let v = f.eval(&rat(1, 2), 80).interval();
        assert!(v.lo() > &rat(14142135623, 10_000_000_000) && v.hi() < &rat(14142135624, 10_000_000_000));
        assert!(v.width() < rat(1, 1 << 60));
        let d1 = f.derivative(1, &int(0), 80);
        assert!(d1.lo() < &rat(693148, 1_000_000) && d1.hi() > &rat(693147, 1_000_000));
    }

    #[test]
    fn moment_values() {
        let m = MomentFunction::new(int(0), int(1)).unwrap();
        assert_eq!(m.eval(&int(0), 64), Interval::point(int(1)));
        let e1 = m.eval(&int(1), 64);
        assert!(e1.lo() < &rat(1718282, 1_000_000) && e1.hi() > &rat(1718281, 1_000_000));
        assert!(e1.width() < rat(1, 1 << 60));
        let tiny = m.eval(&rat(1, 1 << 30), 64);
        assert!(tiny.width() < rat(1, 1 << 60));
        assert!(MomentFunction::new(int(1), int(1)).is_err());
    }
}
