use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::rat::{fmt_rat, Rat};

/// A point of `Q^n`. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(pub Vec<Rat>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![Rat::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Exponent(v.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.0[i] = Rat::one();
        e
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Lexicographic positivity (`self > 0`).
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Exponent(self.0.iter().map(|x| x * c).collect())
    }

    pub fn scale_int(&self, d: u64) -> Self {
        self.scale(&Rat::from_integer(BigInt::from(d)))
    }

    /// Integer coordinates, if all are integral and fit in `i64`.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
            .collect()
    }

    /// Sum of coordinates.
    pub fn degree(&self) -> Rat {
        self.0.iter().fold(Rat::zero(), |a, b| a + b)
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, o: &Exponent) -> Exponent {
        assert_eq!(self.dim(), o.dim(), "exponent dimension mismatch");
        Exponent(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Exponent {
    type Output = Exponent;
    fn sub(self, o: &Exponent) -> Exponent {
        assert_eq!(self.dim(), o.dim(), "exponent dimension mismatch");
        Exponent(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    #[test]
    fn lex_order() {
        let a = Exponent::from_ints(&[1, 5]);
        let b = Exponent::from_ints(&[2, 0]);
        assert!(a < b);
        assert!(Exponent(vec![rat(1, 2), rat(0, 1)]) < Exponent::from_ints(&[1, -3]));
        assert!((&b - &a).is_positive());
        assert!(!Exponent::zero(2).is_positive());
    }
}
