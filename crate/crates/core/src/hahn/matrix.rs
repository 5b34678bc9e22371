//! Positive semidefiniteness of symmetric matrices over truncated Hahn
//! series, decided by the signs of principal minors.

use super::series::HahnSeries;
use super::HahnError;
use crate::exact::PsdStatus;

pub type HahnMatrix = Vec<Vec<HahnSeries>>;

#[derive(Clone, Debug)]
pub struct HahnPsdVerdict {
    pub status: PsdStatus,
    /// For `Indefinite`: a vector `w` with `wᵀAw < 0`, checked by ring
    /// operations only.
    pub witness: Option<Vec<HahnSeries>>,
    /// `wᵀAw` for the witness.
    pub witness_value: Option<HahnSeries>,
    /// Leading principal minors, in order.
    pub leading_minors: Vec<HahnSeries>,
}

fn check_square_symmetric(a: &HahnMatrix) -> Result<usize, HahnError> {
    let n = a.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(HahnError::NotSquare);
        }
        for j in 0..i {
            if a[i][j] != a[j][i] {
                return Err(HahnError::Asymmetric(i, j));
            }
        }
    }
    Ok(n)
}

/// Determinant of the submatrix on `rows × cols` by cofactor expansion with
/// memoisation over column subsets. Ring operations only.
fn minor(a: &HahnMatrix, idx: &[usize], dim: usize) -> Result<HahnSeries, HahnError> {
    let k = idx.len();
    if k == 0 {
        return Ok(HahnSeries::one(dim));
    }
    // memo[mask] = det of rows idx[k - popcount(mask)..] × columns in mask.
    let mut memo: Vec<Option<HahnSeries>> = vec![None; 1 << k];
    memo[0] = Some(HahnSeries::one(dim));
    for mask in 1usize..(1 << k) {
        let m = mask.count_ones() as usize;
        let row = idx[k - m];
        let mut acc = HahnSeries::zero(dim);
        let mut sign_pos = true;
        for c in 0..k {
            if mask & (1 << c) == 0 {
                continue;
            }
            let sub = memo[mask & !(1 << c)].as_ref().unwrap();
            let term = a[row][idx[c]].mul(sub)?;
            acc = if sign_pos { acc.add(&term)? } else { acc.sub(&term)? };
            sign_pos = !sign_pos;
        }
        memo[mask] = Some(acc);
    }
    Ok(memo[(1 << k) - 1].take().unwrap())
}

/// Cofactor matrix entry `(i, j)` of the principal submatrix on `idx`.
fn cofactor(a: &HahnMatrix, idx: &[usize], i: usize, j: usize, dim: usize) -> Result<HahnSeries, HahnError> {
    let k = idx.len();
    let rows: Vec<usize> = (0..k).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..k).filter(|&c| c != j).collect();
    let sub: HahnMatrix = rows.iter().map(|&r| cols.iter().map(|&c| a[idx[r]][idx[c]].clone()).collect()).collect();
    let all: Vec<usize> = (0..k - 1).collect();
    let d = minor(&sub, &all, dim)?;
    Ok(if (i + j) % 2 == 0 { d } else { d.neg() })
}

/// `wᵀ A w` over the full matrix.
pub fn quad_form(a: &HahnMatrix, w: &[HahnSeries]) -> Result<HahnSeries, HahnError> {
    let dim = w.first().map_or(1, HahnSeries::dim);
    let mut s = HahnSeries::zero(dim);
    for (i, wi) in w.iter().enumerate() {
        if wi.is_exact_zero() {
            continue;
        }
        for (j, wj) in w.iter().enumerate() {
            if wj.is_exact_zero() {
                continue;
            }
            s = s.add(&wi.mul(&a[i][j])?.mul(wj)?)?;
        }
    }
    Ok(s)
}

/// Classifies a symmetric Hahn matrix. A principal minor that vanishes up to
/// its cutoff makes the verdict undecidable unless another minor is already
/// certified negative.
pub fn psd_check_hahn(a: &HahnMatrix) -> Result<HahnPsdVerdict, HahnError> {
    let n = check_square_symmetric(a)?;
    let dim = a.first().and_then(|r| r.first()).map_or(1, HahnSeries::dim);
    let leading: Vec<HahnSeries> = (1..=n)
        .map(|k| minor(a, &(0..k).collect::<Vec<_>>(), dim))
        .collect::<Result<_, _>>()?;
    if leading.iter().all(|m| m.sign() > 0) {
        return Ok(HahnPsdVerdict { status: PsdStatus::PositiveDefinite, witness: None, witness_value: None, leading_minors: leading });
    }
    // Principal minors by increasing size; the first negative one gives a
    // minimal indefinite principal submatrix.
    let mut subsets: Vec<Vec<usize>> = (1usize..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by_key(|s: &Vec<usize>| s.len());
    let mut undetermined: Option<Vec<usize>> = None;
    for idx in &subsets {
        let m = minor(a, idx, dim)?;
        match m.sign() {
            -1 => {
                let (w, val) = witness_for(a, idx, n, dim)?;
                return Ok(HahnPsdVerdict {
                    status: PsdStatus::Indefinite,
                    witness: Some(w),
                    witness_value: Some(val),
                    leading_minors: leading,
                });
            }
            0 if !m.is_exact() && undetermined.is_none() => undetermined = Some(idx.clone()),
            _ => {}
        }
    }
    if let Some(idx) = undetermined {
        return Err(HahnError::IndeterminateAtTruncation(format!("principal minor on {idx:?} vanishes up to its cutoff")));
    }
    Ok(HahnPsdVerdict { status: PsdStatus::PositiveSemidefinite, witness: None, witness_value: None, leading_minors: leading })
}

/// For a principal submatrix `A_T` with negative determinant whose proper
/// principal minors are nonnegative, builds `w` with `wᵀAw < 0` from columns
/// of the adjugate: `A·adj = det·I` gives `adj_jᵀ A adj_j = det·adj_jj`.
fn witness_for(a: &HahnMatrix, idx: &[usize], n: usize, dim: usize) -> Result<(Vec<HahnSeries>, HahnSeries), HahnError> {
    let k = idx.len();
    let embed = |local: Vec<HahnSeries>| {
        let mut w = vec![HahnSeries::zero(dim); n];
        for (p, v) in idx.iter().zip(local) {
            w[*p] = v;
        }
        w
    };
    if k == 1 {
        let w = embed(vec![HahnSeries::one(dim)]);
        let v = quad_form(a, &w)?;
        return Ok((w, v));
    }
    let adj_col = |j: usize| -> Result<Vec<HahnSeries>, HahnError> { (0..k).map(|i| cofactor(a, idx, j, i, dim)).collect() };
    let mut candidates: Vec<Vec<HahnSeries>> = Vec::new();
    for j in 0..k {
        candidates.push(adj_col(j)?);
    }
    for c in &candidates {
        let w = embed(c.clone());
        let v = quad_form(a, &w)?;
        if v.sign() < 0 {
            return Ok((w, v));
        }
    }
    // All diagonal cofactors vanish: combine two adjugate columns.
    for i in 0..k {
        for j in i + 1..k {
            for sgn in [1i64, -1] {
                let s = crate::exact::rat::int(sgn);
                let local: Vec<HahnSeries> = candidates[i]
                    .iter()
                    .zip(&candidates[j])
                    .map(|(x, y)| x.add(&y.scale(&s)))
                    .collect::<Result<_, _>>()?;
                let w = embed(local);
                let v = quad_form(a, &w)?;
                if v.sign() < 0 {
                    return Ok((w, v));
                }
            }
        }
    }
    Err(HahnError::IndeterminateAtTruncation("could not certify a negativity witness".into()))
}

/// Entrywise (Hadamard) product.
pub fn hadamard(a: &HahnMatrix, b: &HahnMatrix) -> Result<HahnMatrix, HahnError> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.mul(y)).collect())
        .collect()
}

/// `Σ_i b_i b_iᵀ`.
pub fn gram_of(vectors: &[Vec<HahnSeries>]) -> Result<HahnMatrix, HahnError> {
    let k = vectors[0].len();
    let dim = vectors[0][0].dim();
    let mut m = vec![vec![HahnSeries::zero(dim); k]; k];
    for b in vectors {
        for i in 0..k {
            for j in 0..k {
                m[i][j] = m[i][j].add(&b[i].mul(&b[j])?)?;
            }
        }
    }
    Ok(m)
}

/// Entrywise residue map.
pub fn residue_matrix(a: &HahnMatrix) -> Result<Vec<Vec<crate::exact::Rat>>, HahnError> {
    a.iter().map(|r| r.iter().map(HahnSeries::residue).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;
    use crate::groupring::Exponent;

    fn eps(k: i64) -> HahnSeries {
        HahnSeries::eps_pow(Exponent::from_ints(&[k]))
    }

    fn c(v: i64) -> HahnSeries {
        HahnSeries::constant(1, int(v))
    }

    #[test]
    fn diagonal_infinitesimals_are_pd() {
        let a = vec![vec![eps(1), c(0)], vec![c(0), eps(2)]];
        assert_eq!(psd_check_hahn(&a).unwrap().status, PsdStatus::PositiveDefinite);
    }

    #[test]
    fn rank_one_with_inverse_powers() {
        let a = vec![vec![eps(1), c(1)], vec![c(1), eps(-1)]];
        assert_eq!(psd_check_hahn(&a).unwrap().status, PsdStatus::PositiveSemidefinite);
    }

    #[test]
    fn negative_infinitesimal() {
        let a = vec![vec![eps(1).neg()]];
        let v = psd_check_hahn(&a).unwrap();
        assert_eq!(v.status, PsdStatus::Indefinite);
        assert!(v.witness_value.unwrap().sign() < 0);
        let pi = residue_matrix(&a).unwrap();
        assert_eq!(pi, vec![vec![int(0)]]);
    }

    #[test]
    fn witness_from_adjugate() {
        // Zero diagonal: the combined-column fallback is needed.
        let a = vec![vec![c(0), eps(1)], vec![eps(1), c(0)]];
        let v = psd_check_hahn(&a).unwrap();
        assert_eq!(v.status, PsdStatus::Indefinite);
        assert!(v.witness_value.unwrap().sign() < 0);
        let b = vec![
            vec![c(2), c(1), eps(0).scale(&int(3))],
            vec![c(1), c(2), c(1)],
            vec![c(3), c(1), c(2)],
        ];
        let v = psd_check_hahn(&b).unwrap();
        assert_eq!(v.status, PsdStatus::Indefinite);
        assert!(quad_form(&b, v.witness.as_ref().unwrap()).unwrap().sign() < 0);
    }

    #[test]
    fn truncated_zero_minor_is_indeterminate() {
        let z = HahnSeries::from_terms(1, [], Some(Exponent::from_ints(&[2]))).unwrap();
        let a = vec![vec![c(1), c(1)], vec![c(1), c(1).add(&z).unwrap()]];
        assert!(matches!(psd_check_hahn(&a), Err(HahnError::IndeterminateAtTruncation(_))));
    }
}
