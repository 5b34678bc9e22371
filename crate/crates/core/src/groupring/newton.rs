//! Finite supports in `Z_{>=0}^n` and lattice points of scaled Newton polytopes.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::element::GroupRingElement;
use super::exponent::Exponent;
use super::GroupRingError;
use crate::exact::linalg::{dot, nullspace};
use crate::exact::lp::convex_weights;
use crate::exact::rat::Rat;

/// A sorted, duplicate-free set of nonnegative integer exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet {
    pub n: usize,
    pub points: Vec<Vec<i64>>,
}

impl SupportSet {
    pub fn new(n: usize, mut points: Vec<Vec<i64>>) -> Result<Self, GroupRingError> {
        for p in &points {
            if p.len() != n {
                return Err(GroupRingError::DimensionMismatch { left: n, right: p.len() });
            }
            if p.iter().any(|&x| x < 0) {
                return Err(GroupRingError::NegativeExponent(Exponent::from_ints(p)));
            }
        }
        points.sort();
        points.dedup();
        Ok(SupportSet { n, points })
    }

    /// Support of an element with nonnegative integer exponents.
    pub fn of(p: &GroupRingElement) -> Result<Self, GroupRingError> {
        let mut pts = Vec::with_capacity(p.len());
        for (e, _) in p.terms() {
            let v = e.to_i64s().ok_or_else(|| GroupRingError::FractionalExponent(e.clone()))?;
            pts.push(v);
        }
        Self::new(p.dim(), pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    pub fn scaled(&self, d: i64) -> Self {
        SupportSet { n: self.n, points: self.points.iter().map(|p| p.iter().map(|x| x * d).collect()).collect() }
    }

    pub fn exponents(&self) -> Vec<Exponent> {
        self.points.iter().map(|p| Exponent::from_ints(p)).collect()
    }

    /// All pairwise sums `β + γ` (with repetition), sorted and deduplicated.
    pub fn pair_sums(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i..] {
                out.push(a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Lattice points of `conv(d·S)` (`T1`) and of `½·conv(d·S)` (`T2`).
pub fn newton_bases(s: &SupportSet, d: i64) -> Result<(SupportSet, SupportSet), GroupRingError> {
    if s.is_empty() {
        return Err(GroupRingError::EmptySupport);
    }
    assert!(d >= 1, "newton_bases needs d >= 1");
    let ds = s.scaled(d);
    let poly = Polytope::new(&ds.points);
    let t1 = lattice_points(&poly, 1, s.n);
    let t2 = lattice_points(&poly, 2, s.n);
    Ok((SupportSet::new(s.n, t1)?, SupportSet::new(s.n, t2)?))
}

/// Convex hull of finitely many integer points, with its affine hull stored
/// as exact equations `a·x = b`.
pub struct Polytope {
    points: Vec<Vec<Rat>>,
    equations: Vec<(Vec<Rat>, Rat)>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Polytope {
    pub fn new(points: &[Vec<i64>]) -> Self {
        let n = points[0].len();
        let pts: Vec<Vec<Rat>> = points.iter().map(|p| p.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect()).collect();
        let diffs: Vec<Vec<Rat>> = pts[1..].iter().map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
        let normals = if diffs.is_empty() {
            (0..n)
                .map(|i| {
                    let mut v = vec![Rat::zero(); n];
                    v[i] = Rat::from_integer(1.into());
                    v
                })
                .collect()
        } else {
            nullspace(&diffs, n)
        };
        let equations = normals
            .into_iter()
            .map(|a| {
                let b = dot(&a, &pts[0]);
                (a, b)
            })
            .collect();
        let lo = (0..n).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
        let hi = (0..n).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
        Polytope { points: pts, equations, lo, hi }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        if self.equations.iter().any(|(a, b)| dot(a, x) != *b) {
            return false;
        }
        convex_weights(&self.points, x).is_some()
    }
}

/// Integer points `t` with `k·t` in the polytope.
fn lattice_points(poly: &Polytope, k: i64, n: usize) -> Vec<Vec<i64>> {
    let lo: Vec<i64> = poly.lo.iter().map(|&v| v.div_euclid(k) + i64::from(v.rem_euclid(k) != 0)).collect();
    let hi: Vec<i64> = poly.hi.iter().map(|&v| v.div_euclid(k)).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Vec::new();
    }
    let kr = Rat::from_integer(BigInt::from(k));
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let x: Vec<Rat> = cur.iter().map(|&v| Rat::from_integer(BigInt::from(v)) * &kr).collect();
        if poly.contains(&x) {
            out.push(cur.clone());
        }
        // Odometer increment.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, pts: &[&[i64]]) -> SupportSet {
        SupportSet::new(n, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn univariate_segment() {
        let (t1, t2) = newton_bases(&set(1, &[&[0], &[2]]), 1).unwrap();
        assert_eq!(t1.points, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(t2.points, vec![vec![0], vec![1]]);
    }

    #[test]
    fn diagonal_segment_excludes_origin() {
        let (_, t2) = newton_bases(&set(2, &[&[2, 0], &[0, 2]]), 1).unwrap();
        assert_eq!(t2.points, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn motzkin_half_polytope() {
        let s = set(3, &[&[0, 0, 6], &[2, 2, 2], &[2, 4, 0], &[4, 2, 0]]);
        let (_, t2) = newton_bases(&s, 1).unwrap();
        assert_eq!(t2.points, vec![vec![0, 0, 3], vec![1, 1, 1], vec![1, 2, 0], vec![2, 1, 0]]);
        let (_, t2) = newton_bases(&s, 2).unwrap();
        assert_eq!(t2.len(), 10);
        assert!(t2.contains(&[2, 2, 2]) && t2.contains(&[3, 3, 0]) && t2.contains(&[0, 0, 6]));
    }

    #[test]
    fn single_point() {
        let (t1, t2) = newton_bases(&set(2, &[&[2, 4]]), 1).unwrap();
        assert_eq!(t1.points, vec![vec![2, 4]]);
        assert_eq!(t2.points, vec![vec![1, 2]]);
        let (_, t2) = newton_bases(&set(1, &[&[3]]), 1).unwrap();
        assert!(t2.is_empty());
    }
}
