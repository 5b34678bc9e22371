//! Closed intervals with rational endpoints and certified enclosures of
//! `exp` and `ln` at rational arguments.
//!
//! Every operation rounds outward, so the true real value always lies in the
//! returned interval. Endpoints are snapped to dyadic grids to keep their
//! size bounded.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::rat::{fmt_rat, to_f64, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] (~{:.6e})", fmt_rat(&self.lo), fmt_rat(&self.hi), self.mid_f64())
    }
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "empty interval");
        Self { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rat::zero())
    }

    pub fn one() -> Self {
        Self::point(Rat::one())
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    pub fn radius(&self) -> Rat {
        self.width() / Rat::from_integer(2.into())
    }

    pub fn mid_f64(&self) -> f64 {
        (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// `Some(sign)` when the interval excludes zero or is exactly `[0, 0]`.
    pub fn certified_sign(&self) -> Option<i8> {
        if self.certainly_positive() {
            Some(1)
        } else if self.certainly_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_negative() {
            Self { lo: &self.hi * c, hi: &self.lo * c }
        } else {
            Self { lo: &self.lo * c, hi: &self.hi * c }
        }
    }

    pub fn add_rat(&self, c: &Rat) -> Self {
        Self { lo: &self.lo + c, hi: &self.hi + c }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.lo.is_positive() || o.hi.is_negative() {
            Some(self.mul(&Self::new(o.hi.recip(), o.lo.recip())))
        } else {
            None
        }
    }

    pub fn square(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = (&self.lo * &self.lo).max(&self.hi * &self.hi);
            Self { lo: Rat::zero(), hi: m }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            if a <= b { Self { lo: a, hi: b } } else { Self { lo: b, hi: a } }
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn hull(&self, o: &Self) -> Self {
        Self { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// Rounds endpoints outward to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        let scale = BigInt::one() << bits;
        let lo_n = (self.lo.numer() * &scale).div_floor(self.lo.denom());
        let hi_n = (self.hi.numer() * &scale).div_ceil(self.hi.denom());
        Self { lo: Rat::new(lo_n, scale.clone()), hi: Rat::new(hi_n, scale) }
    }
}

fn pow2(bits: u32) -> Rat {
    Rat::from_integer(BigInt::one() << bits)
}

/// `floor(x · 2^w)`.
fn to_fixed(x: &Rat, w: u32) -> BigInt {
    (x.numer() << w).div_floor(x.denom())
}

/// The interval `[(c − e)·2^-w, (c + e)·2^-w]`.
fn from_fixed(c: &BigInt, e: &BigInt, w: u32) -> Interval {
    let scale = BigInt::one() << w;
    Interval::new(Rat::new(c - e, scale.clone()), Rat::new(c + e, scale))
}

/// Taylor series of `exp(y)` for `|y| <= 1/2` in fixed point with `w`
/// fractional bits. Each truncation moves a term by at most one unit, and
/// the propagated error of a term stays below eight units.
fn exp_small(y: &Rat, w: u32) -> Interval {
    let one = BigInt::one() << w;
    let yf = to_fixed(y, w);
    let mut term = one.clone();
    let mut sum = one;
    let mut k = 0u64;
    loop {
        k += 1;
        term = ((&term * &yf) >> w) / BigInt::from(k);
        sum += &term;
        // Remaining tail is at most 2·|term| once |y| <= 1/2.
        if term.abs() <= BigInt::one() {
            let err = BigInt::from(8 * (k + 2) + 16);
            return from_fixed(&sum, &err, w);
        }
    }
}

/// Enclosure of `exp(x)` of width about `2^-bits` relative to its magnitude.
pub fn exp_rat(x: &Rat, bits: u32) -> Interval {
    if x.is_zero() {
        return Interval::one();
    }
    let half = Rat::new(1.into(), 2.into());
    let mut s = 0u32;
    let mut y = x.clone();
    while y.abs() > half {
        y /= Rat::from_integer(2.into());
        s += 1;
    }
    let mag = (to_f64(x).abs() * std::f64::consts::LOG2_E).ceil() as u32 + 1;
    let guard = bits + 2 * s + 16 + mag;
    let mut iv = exp_small(&y, guard + 16).round_out(guard);
    for _ in 0..s {
        iv = iv.square().round_out(guard);
    }
    let iv = iv.round_out(bits + 8);
    // exp is positive; tiny values may round down to zero.
    if iv.lo.is_negative() {
        Interval::new(Rat::zero(), iv.hi)
    } else {
        iv
    }
}

/// `2·atanh(z)` for `|z| <= 1/2`, enclosed to about `2^-bits`.
fn two_atanh(z: &Rat, bits: u32) -> Interval {
    if z.is_negative() {
        return two_atanh(&-z.clone(), bits).neg();
    }
    if z.is_zero() {
        return Interval::zero();
    }
    // Fixed point with w fractional bits. Powers are truncated downwards, so
    // the computed sum underestimates the true one by at most 2(k+1)^2 units,
    // and the tail after the last term is added separately.
    let w = bits + 32;
    let zf = to_fixed(z, w);
    let z2 = to_fixed(&(z * z), w);
    let one_minus = Rat::one() - z * z;
    let target = pow2(bits + 8).recip();
    let mut pow = zf;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    loop {
        sum += &pow / BigInt::from(2 * k + 1);
        pow = (&pow * &z2) >> w;
        k += 1;
        let p = Rat::new(&pow + BigInt::from(2 * k + 1), BigInt::one() << w);
        let tail = p / (Rat::from_integer(BigInt::from(2 * k + 1)) * &one_minus);
        if tail <= target {
            let err = BigInt::from(2 * (k + 1) * (k + 1));
            let scale = BigInt::one() << w;
            let lo = Rat::new(sum.clone(), scale.clone());
            let hi = Rat::new(&sum + err, scale) + tail;
            let two = Rat::from_integer(2.into());
            return Interval::new(lo * &two, hi * &two).round_out(bits + 4);
        }
    }
}

/// Enclosure of `ln(2)`.
pub fn ln2(bits: u32) -> Interval {
    two_atanh(&Rat::new(1.into(), 3.into()), bits + 4)
}

/// Enclosure of `ln(b)` for rational `b > 0`.
pub fn ln_rat(b: &Rat, bits: u32) -> Interval {
    assert!(b.is_positive(), "ln of nonpositive value");
    if b.is_one() {
        return Interval::zero();
    }
    // b = 2^k · m with m near 1.
    let k = b.numer().bits() as i64 - b.denom().bits() as i64;
    let m = if k >= 0 {
        b / Rat::from_integer(BigInt::one() << (k as u32))
    } else {
        b * Rat::from_integer(BigInt::one() << ((-k) as u32))
    };
    let kb = (k.unsigned_abs() as f64 + 1.0).log2().ceil() as u32;
    let work = bits + kb + 8;
    let z = (&m - Rat::one()) / (&m + Rat::one());
    let lnm = two_atanh(&z, work);
    let l2 = ln2(work).scale(&Rat::from_integer(BigInt::from(k)));
    lnm.add(&l2).round_out(bits + 4)
}

/// Enclosure of `b^x = exp(x·ln b)` for rational `b > 0` and rational `x`.
pub fn pow_rat(b: &Rat, x: &Rat, bits: u32) -> Interval {
    if x.is_integer() {
        let e = x.to_integer();
        let e: i32 = e.try_into().expect("exponent out of range");
        let v = if e >= 0 { pow_int(b, e as u32) } else { pow_int(&b.recip(), (-e) as u32) };
        return Interval::point(v);
    }
    let mag = (to_f64(x).abs() * to_f64(b).ln().abs()).max(1.0).log2().ceil() as u32;
    let l = ln_rat(b, bits + mag + 8);
    exp_interval(&l.scale(x), bits)
}

fn pow_int(b: &Rat, e: u32) -> Rat {
    num_traits::pow(b.clone(), e as usize)
}

/// Enclosure of `exp` over an interval argument.
pub fn exp_interval(x: &Interval, bits: u32) -> Interval {
    let lo = exp_rat(x.lo(), bits);
    let hi = exp_rat(x.hi(), bits);
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Determinant of the principal submatrix on `idx`, by cofactor expansion
/// with memoisation over column subsets. Endpoints are rounded outward to
/// `2^-bits` after each step.
pub fn interval_minor(m: &[Vec<Interval>], idx: &[usize], bits: u32) -> Interval {
    let k = idx.len();
    let mut memo: Vec<Option<Interval>> = vec![None; 1 << k];
    memo[0] = Some(Interval::one());
    for mask in 1usize..(1 << k) {
        let row = idx[k - mask.count_ones() as usize];
        let mut acc = Interval::zero();
        let mut positive = true;
        for c in 0..k {
            if mask & (1 << c) == 0 {
                continue;
            }
            let term = m[row][idx[c]].mul(memo[mask & !(1 << c)].as_ref().unwrap());
            acc = if positive { acc.add(&term) } else { acc.sub(&term) };
            positive = !positive;
        }
        memo[mask] = Some(acc.round_out(bits));
    }
    memo[(1 << k) - 1].take().unwrap()
}

/// Leading principal minors of a square interval matrix.
pub fn interval_leading_minors(m: &[Vec<Interval>], bits: u32) -> Vec<Interval> {
    (1..=m.len()).map(|k| interval_minor(m, &(0..k).collect::<Vec<_>>(), bits)).collect()
}

/// Certified classification of a symmetric interval matrix: `Some(true)` if
/// every leading minor is certainly positive, `Some(false)` if some principal
/// minor is certainly negative, `None` otherwise.
pub fn interval_pd(m: &[Vec<Interval>], bits: u32) -> Option<bool> {
    let lead = interval_leading_minors(m, bits);
    if lead.iter().all(Interval::certainly_positive) {
        return Some(true);
    }
    let n = m.len();
    for mask in 1usize..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if interval_minor(m, &idx, bits).certainly_negative() {
            return Some(false);
        }
    }
    None
}
