use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::function::{ExpSumFunction, FnValue, MomentFunction};
use super::PosdefError;
use crate::exact::linalg::nullspace;
use crate::exact::rat::{primitive_integer, serde_rat, serde_rat_vec, Rat};
use crate::exact::{psd_check, PsdStatus, SymRatMatrix};
use crate::interval::{interval_pd, Interval};

/// The matrix `(f(x_i + x_j))` at a finite point set.
#[derive(Clone, Debug)]
pub struct GramSample {
    pub points: Vec<Rat>,
    /// Exact matrix, present when every entry is rational.
    pub exact: Option<SymRatMatrix>,
    /// Entry enclosures; point intervals when exact.
    pub enclosure: Vec<Vec<Interval>>,
}

impl GramSample {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

fn check_distinct(points: &[Rat]) -> Result<(), PosdefError> {
    for i in 0..points.len() {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(PosdefError::RepeatedPoint);
            }
        }
    }
    Ok(())
}

fn assemble(points: &[Rat], mut entry: impl FnMut(&Rat) -> FnValue) -> GramSample {
    let k = points.len();
    let mut enc = vec![vec![Interval::zero(); k]; k];
    let mut rows = vec![vec![Rat::zero(); k]; k];
    let mut exact = true;
    for i in 0..k {
        for j in i..k {
            let v = entry(&(&points[i] + &points[j]));
            if let Some(r) = v.exact() {
                rows[i][j] = r.clone();
                rows[j][i] = r.clone();
            } else {
                exact = false;
            }
            enc[i][j] = v.interval();
            enc[j][i] = enc[i][j].clone();
        }
    }
    GramSample {
        points: points.to_vec(),
        exact: exact.then(|| SymRatMatrix::from_rows(rows).expect("symmetric by construction")),
        enclosure: enc,
    }
}

/// `(f(x_i + x_j))_{i,j}`, exact at integer sums and enclosed otherwise.
pub fn gram_matrix(f: &ExpSumFunction, points: &[Rat], bits: u32) -> Result<GramSample, PosdefError> {
    check_distinct(points)?;
    Ok(assemble(points, |x| f.eval(x, bits)))
}

/// Gram enclosure of a moment function.
pub fn moment_gram(f: &MomentFunction, points: &[Rat], bits: u32) -> Result<GramSample, PosdefError> {
    check_distinct(points)?;
    Ok(assemble(points, |x| FnValue::Enclosure(f.eval(x, bits))))
}

/// Certifies that the moment Gram matrix at distinct points is positive
/// definite, refining precision until every leading minor is certified.
pub fn certify_moment_gram_pd(f: &MomentFunction, points: &[Rat], max_bits: u32) -> Result<u32, PosdefError> {
    check_distinct(points)?;
    let mut bits = 64;
    while bits <= max_bits {
        let g = moment_gram(f, points, bits)?;
        match interval_pd(&g.enclosure, bits + 16) {
            Some(true) => return Ok(bits),
            Some(false) => return Err(PosdefError::NotPositiveDefinite),
            None => bits *= 2,
        }
    }
    Err(PosdefError::PrecisionInsufficient(max_bits))
}

/// Integer point windows `x0, x0+1, …, x0+k` scanned for a violation.
#[derive(Clone, Debug)]
pub struct GridSearch {
    pub start: i64,
    pub end: i64,
}

impl Default for GridSearch {
    fn default() -> Self {
        GridSearch { start: 0, end: 50 }
    }
}

/// An exact proof that `f` is not `(k+1)`-positive semidefinite.
#[derive(Clone, Debug, Serialize)]
pub struct NotKpsdWitness {
    #[serde(with = "serde_rat_vec")]
    pub points: Vec<Rat>,
    #[serde(with = "serde_rat_vec")]
    pub w: Vec<Rat>,
    pub matrix: SymRatMatrix,
    #[serde(with = "serde_rat")]
    pub value: Rat,
    #[serde(with = "serde_rat")]
    pub det: Rat,
    /// True when the precomputed kernel vector itself was negative.
    pub from_kernel_recipe: bool,
}

impl NotKpsdWitness {
    /// Re-checks the witness with exact arithmetic only.
    pub fn verify(&self, f: &ExpSumFunction) -> bool {
        let k = self.points.len();
        if self.matrix.dim() != k || self.w.len() != k {
            return false;
        }
        for i in 0..k {
            for j in 0..k {
                let s = &self.points[i] + &self.points[j];
                if !s.is_integer() {
                    return false;
                }
                let x: i64 = match s.to_integer().try_into() {
                    Ok(x) => x,
                    Err(_) => return false,
                };
                if *self.matrix.get(i, j) != f.eval_int(x) {
                    return false;
                }
            }
        }
        let q = self.matrix.quad_form(&self.w);
        q == self.value && q.is_negative() && self.matrix.det() == self.det
    }
}

/// A vector orthogonal to `(1, b, …, b^k)` for the largest bases `b > 1`.
/// Along consecutive integer windows these atoms contribute `c·b^{2x0}·uuᵀ`,
/// so `w` annihilates the dominant part of the Gram matrix.
pub fn kernel_recipe(f: &ExpSumFunction, k: usize) -> Option<Vec<Rat>> {
    let mut big: Vec<&Rat> = f.atoms().iter().filter(|(c, b)| c.is_positive() && b > &Rat::one()).map(|(_, b)| b).collect();
    big.sort();
    big.reverse();
    big.truncate(k);
    let rows: Vec<Vec<Rat>> = big.iter().map(|b| (0..=k).map(|i| num_traits::pow((*b).clone(), i)).collect()).collect();
    let ns = nullspace(&rows, k + 1);
    ns.into_iter().next().map(|v| primitive_integer(&v))
}

/// Searches windows of `k + 1` consecutive integers for an exact proof that
/// `f` is not `(k+1)`-positive semidefinite.
pub fn certify_not_kpsd(f: &ExpSumFunction, k: usize, search: &GridSearch) -> Result<NotKpsdWitness, PosdefError> {
    let recipe = kernel_recipe(f, k);
    for x0 in search.start..=search.end {
        let points: Vec<Rat> = (0..=k as i64).map(|i| Rat::from_integer((x0 + i).into())).collect();
        let m = SymRatMatrix::from_fn(k + 1, |i, j| f.eval_int(2 * x0 + (i + j) as i64));
        if let Some(w) = &recipe {
            let value = m.quad_form(w);
            if value.is_negative() {
                let det = m.det();
                return Ok(NotKpsdWitness { points, w: w.clone(), matrix: m, value, det, from_kernel_recipe: true });
            }
        }
        let verdict = psd_check(&m);
        if verdict.status == PsdStatus::Indefinite {
            let w = verdict.witness.expect("indefinite verdicts carry a witness");
            let value = m.quad_form(&w);
            let det = m.det();
            return Ok(NotKpsdWitness { points, w, matrix: m, value, det, from_kernel_recipe: false });
        }
    }
    Err(PosdefError::NotFound { start: search.start, end: search.end })
}
