//! Rational scalars and their string forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRatError(pub String);

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    let err = || ParseRatError(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let whole: BigInt = if ip.is_empty() { BigInt::zero() } else { ip.parse().map_err(|_| err())? };
        let frac: BigInt = fp.parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rat::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(Rat::from_integer(n))
}

/// Canonical `"num/den"` form; integers print without a denominator.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Shift both to a common bit length before converting.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY }
            } else {
                n / d
            }
        }
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn approx_f64(x: f64, max_den: &BigInt) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let exact = Rat::from_float(x)?;
    Some(limit_denominator(&exact, max_den))
}

pub fn limit_denominator(x: &Rat, max_den: &BigInt) -> Rat {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0).div_floor(&q1);
    let b1 = Rat::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let b2 = Rat::new(p1, q1);
    if (&b2 - x).abs() <= (&b1 - x).abs() {
        b2
    } else {
        b1
    }
}

/// Rounds to the nearest multiple of `2^-bits`.
pub fn round_dyadic(x: f64, bits: u32) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let scaled = (x * 2f64.powi(bits as i32)).round();
    let n: BigInt = num_traits::FromPrimitive::from_f64(scaled)?;
    Some(Rat::new(n, BigInt::one() << bits))
}

/// Multiplies a vector by the least positive rational that makes it a
/// primitive integer vector.
pub fn primitive_integer(v: &[Rat]) -> Vec<Rat> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rat_vec {
    use super::*;
    use serde::Serialize;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-7").unwrap(), int(-7));
        assert_eq!(parse_rat("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rat(" 4/-2 ").unwrap(), int(-2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn format_round_trip() {
        for r in [rat(-3, 7), int(0), int(12), rat(39956170693955, 665127936)] {
            assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
        }
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
    }

    #[test]
    fn continued_fraction_limit() {
        let pi = Rat::from_float(std::f64::consts::PI).unwrap();
        assert_eq!(limit_denominator(&pi, &BigInt::from(10)), rat(22, 7));
        assert_eq!(limit_denominator(&pi, &BigInt::from(200)), rat(355, 113));
        assert_eq!(approx_f64(0.5, &BigInt::from(3)).unwrap(), rat(1, 2));
    }

    #[test]
    fn primitive_scaling() {
        let v = primitive_integer(&[rat(1, 2), rat(-3, 4), int(0)]);
        assert_eq!(v, vec![int(2), int(-3), int(0)]);
    }

    #[test]
    fn huge_to_f64() {
        let big = Rat::new(BigInt::from(3) << 2000usize, BigInt::from(2) << 2000usize);
        assert!((to_f64(&big) - 1.5).abs() < 1e-12);
    }
}
