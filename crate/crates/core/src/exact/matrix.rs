//! Dense symmetric rational matrices with exact PSD classification.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg;
use super::rat::{fmt_rat, parse_rat, primitive_integer, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not square: row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("bad matrix entry: {0}")]
    Entry(String),
}

/// Dense symmetric matrix of rationals, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymRatMatrix {
    n: usize,
    data: Vec<Rat>,
}

impl SymRatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Rat::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare { row: i, len: r.len(), n });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(MatrixError::Asymmetric(i, j));
                }
            }
        }
        Ok(Self { n, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix from a closure evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[j * n + i] = v.clone();
                m.data[i * n + j] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[j * self.n + i] = v.clone();
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// `wᵀ A w`.
    pub fn quad_form(&self, w: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.n {
            if w[i].is_zero() {
                continue;
            }
            let mut row = Rat::zero();
            for j in 0..self.n {
                if !w[j].is_zero() && !self.get(i, j).is_zero() {
                    row += self.get(i, j) * &w[j];
                }
            }
            s += &w[i] * row;
        }
        s
    }

    pub fn mul_vec(&self, w: &[Rat]) -> Vec<Rat> {
        linalg::mat_vec(&self.rows(), w)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect() }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Rat {
        det_square(&self.rows())
    }

    pub fn leading_minors(&self) -> Vec<Rat> {
        (1..=self.n)
            .map(|k| self.principal_submatrix(&(0..k).collect::<Vec<_>>()).det())
            .collect()
    }

    /// A nonzero primitive integer kernel vector if the matrix is singular.
    pub fn kernel_vector(&self) -> Option<Vec<Rat>> {
        kernel_vector_of_rows(&self.rows(), self.n)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.rows())
    }

    pub fn psd_check(&self) -> PsdVerdict {
        psd_check(self)
    }
}

impl fmt::Debug for SymRatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            self.rows().iter().map(|r| r.iter().map(fmt_rat).collect()).collect();
        write!(f, "SymRatMatrix{rows:?}")
    }
}

impl Serialize for SymRatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.rows().iter().map(|r| r.iter().map(fmt_rat).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymRatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(json_rat).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Self::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// Accepts `"p/q"` strings as well as bare JSON integers.
pub fn json_rat(v: &serde_json::Value) -> Result<Rat, MatrixError> {
    match v {
        serde_json::Value::String(s) => parse_rat(s).map_err(|e| MatrixError::Entry(e.to_string())),
        serde_json::Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().unwrap().into())),
        other => Err(MatrixError::Entry(other.to_string())),
    }
}

pub fn det_square(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    if n == 0 {
        return Rat::one();
    }
    let mut a = rows.to_vec();
    let mut sign = Rat::one();
    let mut prev = Rat::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Rat::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn kernel_vector_of_rows(rows: &[Vec<Rat>], ncols: usize) -> Option<Vec<Rat>> {
    let ns = linalg::nullspace(rows, ncols);
    let v = ns.into_iter().next()?;
    let mut v = primitive_integer(&v);
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -x.clone();
        }
    }
    Some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdStatus {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl PsdStatus {
    pub fn is_psd(self) -> bool {
        !matches!(self, PsdStatus::Indefinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdVerdict {
    pub status: PsdStatus,
    /// For `Indefinite`: an integer vector `w` with `wᵀAw < 0`.
    pub witness: Option<Vec<Rat>>,
    /// Pivots of the symmetric-pivoted LDLᵀ, in elimination order.
    pub pivots: Vec<Rat>,
    /// Row permutation used by the factorization (pivot indices in order).
    pub order: Vec<usize>,
}

struct Elimination {
    pivot: usize,
    value: Rat,
    row: Vec<(usize, Rat)>,
}

/// Exact PSD/PD classification by LDLᵀ with symmetric diagonal pivoting.
///
/// A negative diagonal entry of any Schur complement, or a zero diagonal
/// entry with a nonzero off-diagonal in its row, yields `Indefinite` with a
/// negativity witness lifted back to the original coordinates.
pub fn psd_check(a: &SymRatMatrix) -> PsdVerdict {
    let n = a.dim();
    let mut s = a.rows();
    let mut active: Vec<usize> = (0..n).collect();
    let mut steps: Vec<Elimination> = Vec::new();

    loop {
        if active.is_empty() {
            break;
        }
        if let Some(&i) = active.iter().find(|&&i| s[i][i].is_negative()) {
            let mut w = vec![Rat::zero(); n];
            w[i] = Rat::one();
            return indefinite(a, w, &steps);
        }
        let pivot = active
            .iter()
            .copied()
            .filter(|&i| s[i][i].is_positive())
            .max_by(|&x, &y| s[x][x].cmp(&s[y][y]).then(y.cmp(&x)));
        match pivot {
            Some(p) => {
                let pv = s[p][p].clone();
                let row: Vec<(usize, Rat)> = active
                    .iter()
                    .filter(|&&j| j != p && !s[p][j].is_zero())
                    .map(|&j| (j, s[p][j].clone()))
                    .collect();
                for (ii, (i, sip)) in row.iter().enumerate() {
                    let f = sip / &pv;
                    for (j, spj) in &row[ii..] {
                        let v = &s[*i][*j] - &f * spj;
                        s[*i][*j] = v.clone();
                        s[*j][*i] = v;
                    }
                }
                active.retain(|&j| j != p);
                steps.push(Elimination { pivot: p, value: pv, row });
            }
            None => {
                let nz = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !s[i][j].is_zero());
                if let Some((i, j)) = nz {
                    let mut w = vec![Rat::zero(); n];
                    w[i] = Rat::one();
                    w[j] = -s[i][j].clone();
                    return indefinite(a, w, &steps);
                }
                break;
            }
        }
    }
    let order = steps.iter().map(|e| e.pivot).collect();
    let pivots: Vec<Rat> = steps.into_iter().map(|e| e.value).collect();
    let status = if pivots.len() == n {
        PsdStatus::PositiveDefinite
    } else {
        PsdStatus::PositiveSemidefinite
    };
    PsdVerdict { status, witness: None, pivots, order }
}

fn indefinite(a: &SymRatMatrix, mut w: Vec<Rat>, steps: &[Elimination]) -> PsdVerdict {
    for e in steps.iter().rev() {
        let mut acc = Rat::zero();
        for (j, v) in &e.row {
            if !w[*j].is_zero() {
                acc += v * &w[*j];
            }
        }
        w[e.pivot] = -acc / &e.value;
    }
    let w = primitive_integer(&w);
    debug_assert!(a.quad_form(&w).is_negative());
    PsdVerdict {
        status: PsdStatus::Indefinite,
        witness: Some(w),
        pivots: steps.iter().map(|e| e.value.clone()).collect(),
        order: steps.iter().map(|e| e.pivot).collect(),
    }
}
