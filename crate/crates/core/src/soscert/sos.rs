use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cert::{moment_matrix, Diagnostics, DualCertificate, GramProblem, SosCertificate, SosOutcome};
use super::sdp::{self, Entry, SdpProblem, SolverOptions};
use super::SosError;
use crate::exact::linalg::{nullspace, solve};
use crate::exact::rat::{approx_f64, round_dyadic, to_f64, Rat};
use crate::exact::{psd_check, SymRatMatrix};
use crate::groupring::{newton_bases, GroupRingElement, SupportSet};

/// Precision schedule used when neither a flag nor the environment sets one.
pub const DEFAULT_PRECISION: [u32; 4] = [8, 16, 32, 64];
pub const PRECISION_ENV: &str = "SHADOW_OBSTRUCT_PRECISION";
pub const DEFAULT_BASIS_CAP: usize = 80;

/// Parses a comma-separated list of bit counts such as `"8,16,32"`.
pub fn parse_precision(s: &str) -> Result<Vec<u32>, SosError> {
    let v: Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
    match v {
        Ok(v) if !v.is_empty() && v.iter().all(|&b| (1..=4096).contains(&b)) => Ok(v),
        _ => Err(SosError::BadPrecision(s.to_string())),
    }
}

/// The schedule from the environment variable, or the default.
pub fn precision_from_env() -> Result<Vec<u32>, SosError> {
    match std::env::var(PRECISION_ENV) {
        Ok(s) => parse_precision(&s),
        Err(_) => Ok(DEFAULT_PRECISION.to_vec()),
    }
}

#[derive(Clone, Debug)]
pub struct SosOptions {
    pub basis_cap: usize,
    /// Rounding precisions in bits, tried in order.
    pub precision: Vec<u32>,
    /// Replaces the Newton-polytope basis.
    pub basis: Option<SupportSet>,
}

impl Default for SosOptions {
    fn default() -> Self {
        SosOptions { basis_cap: DEFAULT_BASIS_CAP, precision: DEFAULT_PRECISION.to_vec(), basis: None }
    }
}

/// Default monomial basis: lattice points of half the Newton polytope.
pub fn default_basis(p: &GroupRingElement) -> Result<SupportSet, SosError> {
    let s = SupportSet::of(p)?;
    Ok(newton_bases(&s, 1)?.1)
}

/// Decides membership of `p` in the SOS cone on a fixed basis, returning an
/// exactly verified certificate in either direction when rounding succeeds.
pub fn sos_check(p: &GroupRingElement, opts: &SosOptions) -> Result<SosOutcome, SosError> {
    if !p.has_integer_exponents() {
        return Err(SosError::FractionalExponent(p.to_string()));
    }
    if p.is_zero() {
        let basis = SupportSet::new(p.dim(), Vec::new())?;
        let gram = SymRatMatrix::zeros(0);
        let psd = psd_check(&gram).status;
        return Ok(SosOutcome::Sos(Box::new(SosCertificate { target: p.clone(), basis, gram, psd })));
    }
    let basis = match &opts.basis {
        Some(b) => b.clone(),
        None => default_basis(p)?,
    };
    if basis.len() > opts.basis_cap {
        return Err(SosError::BasisTooLarge { size: basis.len(), cap: opts.basis_cap });
    }
    let gp = GramProblem::new(p, &basis)?;
    let mut diag = Diagnostics { basis_size: basis.len(), equations: gp.alphas.len(), ..Default::default() };
    if !gp.unreachable.is_empty() {
        let cert = dual_for_unreachable(&gp)?;
        cert.verify()?;
        return Ok(SosOutcome::NotSos(Box::new(cert)));
    }

    let numeric = NumericGram::solve(&gp);
    diag.sdp_iterations = numeric.iterations;
    diag.min_eigenvalue_bound = numeric.t;
    // Both roundings are attempted near the boundary; exact checks decide.
    let tol = 1e-5;

    if numeric.t > -tol {
        for &bits in &opts.precision {
            diag.tried_bits.push(bits);
            if let Some(cert) = round_primal(&gp, &numeric, bits) {
                cert.verify()?;
                return Ok(SosOutcome::Sos(Box::new(cert)));
            }
        }
    }
    if numeric.t < tol {
        for &bits in &opts.precision {
            diag.tried_bits.push(bits);
            if let Some(cert) = round_dual(&gp, &numeric, bits) {
                cert.verify()?;
                return Ok(SosOutcome::NotSos(Box::new(cert)));
            }
        }
    }
    diag.note = if numeric.t > tol {
        "numerically strictly feasible but exact rounding failed".into()
    } else if numeric.t < -tol {
        "numerically infeasible but no dual certificate verified".into()
    } else {
        "numerically on the boundary of the SOS cone".into()
    };
    Ok(SosOutcome::Inconclusive(diag))
}

/// The numeric optimum of `max t` such that `G − tI ⪰ 0` over Gram matrices
/// of the target, scaled by `scale`.
struct NumericGram {
    /// Gram blocks per parity class, in target units.
    blocks: Vec<DMatrix<f64>>,
    /// Moments per equation, up to a positive factor.
    moments: Vec<f64>,
    t: f64,
    iterations: usize,
}

impl NumericGram {
    fn solve(gp: &GramProblem) -> Self {
        let scale = gp.rhs.iter().map(|c| to_f64(c).abs()).fold(0.0, f64::max).max(1e-300);
        let rhs: Vec<f64> = gp.rhs.iter().map(|c| to_f64(c) / scale).collect();
        let nb = gp.classes.len();
        let mut local = vec![(0usize, 0usize); gp.size()];
        for (b, class) in gp.classes.iter().enumerate() {
            for (l, &i) in class.iter().enumerate() {
                local[i] = (b, l);
            }
        }
        // A particular Gram matrix bounds how far below zero t can go.
        let mut row_sums = vec![0.0f64; gp.size()];
        for (ps, r) in gp.pairs.iter().zip(&rhs) {
            let (i, j) = ps.iter().copied().find(|(i, j)| i == j).unwrap_or(ps[0]);
            if i == j {
                row_sums[i] += r.abs();
            } else {
                row_sums[i] += r.abs() / 2.0;
                row_sums[j] += r.abs() / 2.0;
            }
        }
        let t0 = 1.0 + row_sums.iter().fold(0.0, |a: f64, b| a.max(*b));

        let mut blocks: Vec<usize> = gp.classes.iter().map(Vec::len).collect();
        blocks.push(1);
        let mut a = Vec::with_capacity(gp.alphas.len());
        let mut b = Vec::with_capacity(gp.alphas.len());
        for (ps, r) in gp.pairs.iter().zip(&rhs) {
            let mut entries = Vec::new();
            let mut diag = 0.0;
            for &(i, j) in ps {
                let (bi, li) = local[i];
                let (_, lj) = local[j];
                entries.push(Entry { block: bi, i: li.min(lj), j: li.max(lj), v: 1.0 });
                if i == j {
                    diag += 1.0;
                }
            }
            if diag > 0.0 {
                entries.push(Entry { block: nb, i: 0, j: 0, v: diag });
            }
            a.push(entries);
            b.push(r + diag * t0);
        }
        let problem = SdpProblem { blocks, c: vec![Entry { block: nb, i: 0, j: 0, v: -1.0 }], a, b };
        let sol = sdp::solve(&problem, &SolverOptions::default());
        let t = sol.x[nb][(0, 0)] - t0;
        let gram: Vec<DMatrix<f64>> =
            sol.x[..nb].iter().map(|x| (x + DMatrix::identity(x.nrows(), x.ncols()) * t) * scale).collect();
        NumericGram { blocks: gram, moments: sol.y.iter().map(|v| -v).collect(), t, iterations: sol.iterations }
    }
}

/// Splits the spectrum at its widest gap below `1e-3·λ_max` and returns an
/// orthonormal basis of the numerically small eigenspace.
fn numeric_kernel(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let eig = g.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = vals.last().copied().unwrap_or(0.0).max(1e-300);
    let mut best = (0usize, 1e3);
    for r in 1..=n {
        if vals[r - 1] > 1e-3 * top {
            break;
        }
        let next = if r < n { vals[r] } else { top };
        let ratio = next.max(1e-300) / vals[r - 1].max(1e-14 * top);
        if ratio > best.1 {
            best = (r, ratio);
        }
    }
    let r = best.0;
    DMatrix::from_fn(n, r, |i, k| eig.eigenvectors[(i, idx[k])])
}

/// Rational basis of the kernel guess, from a numerically reduced echelon
/// form whose entries are snapped to small-denominator rationals.
fn rational_kernel(k: &DMatrix<f64>, max_den: u32) -> Option<Vec<Vec<Rat>>> {
    let (n, r) = k.shape();
    let mut m = k.transpose();
    let mut used = vec![false; n];
    for row in 0..r {
        let (col, _) = (0..n).filter(|&c| !used[c]).map(|c| (c, m[(row, c)].abs())).max_by(|a, b| a.1.total_cmp(&b.1))?;
        if m[(row, col)].abs() < 1e-9 {
            return None;
        }
        used[col] = true;
        let pivot = m[(row, col)];
        for c in 0..n {
            m[(row, c)] /= pivot;
        }
        for other in 0..r {
            if other != row {
                let f = m[(other, col)];
                for c in 0..n {
                    m[(other, c)] -= f * m[(row, c)];
                }
            }
        }
    }
    let max_den = BigInt::from(max_den);
    (0..r).map(|i| (0..n).map(|j| approx_f64(m[(i, j)], &max_den)).collect()).collect()
}

fn rat_to_f64_matrix(rows: &[Vec<Rat>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| to_f64(&rows[i][j]))
}

/// One parity block after facial reduction: `G_b = W H Wᵀ`.
struct ReducedBlock {
    /// Columns of `W`, each of length `|class|`.
    w: Vec<Vec<Rat>>,
    h_num: DMatrix<f64>,
}

fn reduce_block(g: &DMatrix<f64>, max_den: u32) -> Option<ReducedBlock> {
    let n = g.nrows();
    let kernel = numeric_kernel(g);
    let w: Vec<Vec<Rat>> = if kernel.ncols() == 0 {
        (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
    } else {
        let kr = rational_kernel(&kernel, max_den)?;
        nullspace(&kr, n)
    };
    let r = w.len();
    if r == 0 {
        return Some(ReducedBlock { w, h_num: DMatrix::zeros(0, 0) });
    }
    // W as an n×r matrix and H = (WᵀW)⁻¹ Wᵀ G W (WᵀW)⁻¹.
    let wm = rat_to_f64_matrix(&w, n).transpose();
    let wtw_inv = (wm.transpose() * &wm).try_inverse()?;
    let h = &wtw_inv * wm.transpose() * g * &wm * &wtw_inv;
    Some(ReducedBlock { w, h_num: (&h + h.transpose()) * 0.5 })
}

/// Kernel vectors are snapped with increasing denominator bounds, so simple
/// faces such as those spanned by evaluations at ±1 are found first.
const KERNEL_DENOMINATORS: [u32; 6] = [1, 2, 12, 120, 2520, 100_000];

/// Rounds the numeric Gram matrix and projects it exactly onto the affine
/// space of Gram matrices of the target, inside the detected face.
fn round_primal(gp: &GramProblem, numeric: &NumericGram, bits: u32) -> Option<SosCertificate> {
    let mut seen = Vec::new();
    for den in KERNEL_DENOMINATORS {
        let Some(reduced) = numeric.blocks.iter().map(|g| reduce_block(g, den)).collect::<Option<Vec<_>>>() else { continue };
        let key: Vec<Vec<Vec<Rat>>> = reduced.iter().map(|r| r.w.clone()).collect();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        if let Some(c) = project_in_face(gp, &reduced, bits) {
            return Some(c);
        }
    }
    None
}

fn project_in_face(gp: &GramProblem, reduced: &[ReducedBlock], bits: u32) -> Option<SosCertificate> {
    // Variables: upper triangles of each H_b.
    let mut var_of: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut h0 = Vec::new();
    for rb in reduced {
        let r = rb.w.len();
        let mut idx = vec![vec![0usize; r]; r];
        for u in 0..r {
            for v in u..r {
                idx[u][v] = h0.len();
                idx[v][u] = h0.len();
                h0.push(round_dyadic(rb.h_num[(u, v)], bits)?);
            }
        }
        var_of.push(idx);
    }
    let nvars = h0.len();
    let mut local = vec![(0usize, 0usize); gp.size()];
    for (b, class) in gp.classes.iter().enumerate() {
        for (l, &i) in class.iter().enumerate() {
            local[i] = (b, l);
        }
    }
    // Row for equation α: Σ mult · (W H Wᵀ)[i][j] over its pairs.
    let mut c = Vec::with_capacity(gp.alphas.len());
    for ps in &gp.pairs {
        let mut row = vec![Rat::zero(); nvars];
        for &(i, j) in ps {
            let mult = if i == j { Rat::one() } else { Rat::from_integer(2.into()) };
            let (b, li) = local[i];
            let (_, lj) = local[j];
            let w = &reduced[b].w;
            for (u, wu) in w.iter().enumerate() {
                if wu[li].is_zero() {
                    continue;
                }
                for (v, wv) in w.iter().enumerate() {
                    if wv[lj].is_zero() {
                        continue;
                    }
                    row[var_of[b][u][v]] += &mult * &wu[li] * &wv[lj];
                }
            }
        }
        c.push(row);
    }
    // Orthogonal projection h = h0 + Cᵀλ with (CCᵀ)λ = rhs − C h0.
    let resid: Vec<Rat> = c.iter().zip(&gp.rhs).map(|(row, r)| r - dot(row, &h0)).collect();
    let cct: Vec<Vec<Rat>> = c.iter().map(|ri| c.iter().map(|rj| dot(ri, rj)).collect()).collect();
    let lambda = solve(&cct, &resid)?;
    let mut h = h0;
    for (row, l) in c.iter().zip(&lambda) {
        if l.is_zero() {
            continue;
        }
        for (hv, cv) in h.iter_mut().zip(row) {
            if !cv.is_zero() {
                *hv += cv * l;
            }
        }
    }
    let m = gp.size();
    let mut g = vec![vec![Rat::zero(); m]; m];
    for (b, rb) in reduced.iter().enumerate() {
        let r = rb.w.len();
        let hb = SymRatMatrix::from_fn(r, |u, v| h[var_of[b][u][v]].clone());
        if !psd_check(&hb).status.is_psd() {
            return None;
        }
        let class = &gp.classes[b];
        for (li, &i) in class.iter().enumerate() {
            for (lj, &j) in class.iter().enumerate() {
                let mut s = Rat::zero();
                for (u, wu) in rb.w.iter().enumerate() {
                    if wu[li].is_zero() {
                        continue;
                    }
                    for (v, wv) in rb.w.iter().enumerate() {
                        if !wv[lj].is_zero() {
                            s += &wu[li] * hb.get(u, v) * &wv[lj];
                        }
                    }
                }
                g[i][j] = s;
            }
        }
    }
    let gram = SymRatMatrix::from_rows(g).ok()?;
    let psd = psd_check(&gram).status;
    if !psd.is_psd() {
        return None;
    }
    Some(SosCertificate { target: gp.target.clone(), basis: gp.basis.clone(), gram, psd })
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// Moments of the uniform probability measure on `[−1, 1]^n`.
fn box_moment(a: &[i64]) -> Rat {
    let mut v = Rat::one();
    for &k in a {
        if k % 2 != 0 {
            return Rat::zero();
        }
        v /= Rat::from_integer((k + 1).into());
    }
    v
}

fn all_pair_sums(basis: &SupportSet) -> Vec<Vec<i64>> {
    basis.pair_sums()
}

fn lebesgue_functional(basis: &SupportSet, at: &[i64]) -> BTreeMap<Vec<i64>, Rat> {
    let norm = box_moment(at);
    all_pair_sums(basis).into_iter().map(|a| {
        let v = box_moment(&a) / &norm;
        (a, v)
    }).collect()
}

/// Rounds the numeric moments and mixes in a small multiple of the box
/// moments, which have a positive definite moment matrix, until the exact
/// moment matrix is PSD and the pairing stays negative.
fn round_dual(gp: &GramProblem, numeric: &NumericGram, bits: u32) -> Option<DualCertificate> {
    let basis = &gp.basis;
    let u: BTreeMap<&Vec<i64>, f64> = gp.alphas.iter().zip(numeric.moments.iter().copied()).collect();
    let diag = |p: &Vec<i64>| -> Vec<i64> { p.iter().map(|x| 2 * x).collect() };
    let first = diag(&basis.points[0]);
    let umax = basis.points.iter().map(|p| u.get(&diag(p)).copied().unwrap_or(0.0)).fold(0.0, f64::max);
    let at = if u.get(&first).copied().unwrap_or(0.0) > 1e-8 * umax {
        first
    } else {
        basis.points.iter().map(diag).max_by(|a, b| u[a].total_cmp(&u[b]))?
    };
    let u0 = u[&at];
    if u0 <= 0.0 {
        return None;
    }
    let max_den = BigInt::one() << bits;
    let mut y: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    for a in all_pair_sums(basis) {
        let v = match u.get(&a) {
            Some(x) => approx_f64(x / u0, &max_den)?,
            None => Rat::zero(),
        };
        y.insert(a, v);
    }
    y.insert(at.clone(), Rat::one());
    let leb = lebesgue_functional(basis, &at);
    let mut thetas = vec![Rat::zero()];
    for k in [40u32, 32, 24, 20, 16, 12, 10, 8, 6, 4, 2] {
        thetas.push(Rat::new(BigInt::one(), BigInt::one() << k));
    }
    for theta in thetas {
        let keep = Rat::one() - &theta;
        let mixed: BTreeMap<Vec<i64>, Rat> = y.iter().map(|(a, v)| (a.clone(), &keep * v + &theta * &leb[a])).collect();
        let value = DualCertificate::pairing(&gp.target, &mixed).ok()?;
        if !value.is_negative() {
            // More of the box functional only makes the pairing larger.
            return None;
        }
        let classes_psd = gp.classes.iter().all(|class| {
            let sub = SymRatMatrix::from_fn(class.len(), |i, j| {
                let a: Vec<i64> = basis.points[class[i]].iter().zip(&basis.points[class[j]]).map(|(x, y)| x + y).collect();
                mixed[&a].clone()
            });
            psd_check(&sub).status.is_psd()
        });
        if classes_psd {
            let moment = moment_matrix(basis, &mixed).ok()?;
            return Some(DualCertificate { target: gp.target.clone(), basis: basis.clone(), y: mixed, moment, value, normalized_at: at });
        }
    }
    None
}

/// A target term outside every same-class pair sum has a free moment, which
/// is set to make the pairing `−1` on top of the box moments.
fn dual_for_unreachable(gp: &GramProblem) -> Result<DualCertificate, SosError> {
    let basis = &gp.basis;
    let at: Vec<i64> = basis.points.first().map(|p| p.iter().map(|x| 2 * x).collect()).ok_or(SosError::EmptyBasis)?;
    let mut y = lebesgue_functional(basis, &at);
    for a in &gp.unreachable {
        y.insert(a.clone(), Rat::zero());
    }
    let free = gp.unreachable[0].clone();
    let rest = DualCertificate::pairing(&gp.target, &y)?;
    let c = gp.target.coeff(&crate::groupring::Exponent::from_ints(&free));
    y.insert(free, -(rest + Rat::one()) / c);
    let value = DualCertificate::pairing(&gp.target, &y)?;
    let moment = moment_matrix(basis, &y)?;
    Ok(DualCertificate { target: gp.target.clone(), basis: basis.clone(), y, moment, value, normalized_at: at })
}
