//! A small dense primal-dual interior point solver for block-diagonal
//! semidefinite programs
//!
//! ```text
//!   min ⟨C, X⟩  s.t.  ⟨A_k, X⟩ = b_k,  X ⪰ 0
//!   max bᵀy     s.t.  Z = C − Σ y_k A_k ⪰ 0
//! ```
//!
//! It uses the HKM search direction with a Mehrotra predictor-corrector
//! step. Results are floating point and only serve as starting points for
//! exact rounding.

use nalgebra::{DMatrix, DVector};

/// One entry `(block, i, j, v)` of a symmetric constraint matrix. Off-diagonal
/// entries stand for both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub c: Vec<Entry>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// Stopped at the iteration limit or on numerical trouble; the iterate
    /// is still returned.
    Stalled,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub iterations: usize,
}

type Blocks = Vec<DMatrix<f64>>;

fn dense(blocks: &[usize], entries: &[Entry]) -> Blocks {
    let mut out: Blocks = blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for e in entries {
        out[e.block][(e.i, e.j)] += e.v;
        if e.i != e.j {
            out[e.block][(e.j, e.i)] += e.v;
        }
    }
    out
}

/// `⟨A, Y⟩` for a sparse symmetric `A` and any `Y`.
fn inner(a: &[Entry], y: &Blocks) -> f64 {
    let mut s = 0.0;
    for e in a {
        let m = &y[e.block];
        s += if e.i == e.j { e.v * m[(e.i, e.i)] } else { e.v * (m[(e.i, e.j)] + m[(e.j, e.i)]) };
    }
    s
}

fn dot(x: &Blocks, y: &Blocks) -> f64 {
    x.iter().zip(y).map(|(a, b)| a.dot(b)).sum()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest step `α ∈ (0, 1]` keeping `X + α·dX` positive definite, damped.
fn step_length(x: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha: f64 = 1.0;
    for (xb, db) in x.iter().zip(dx) {
        let Some(ch) = xb.clone().cholesky() else { return 0.0 };
        let l = ch.l();
        let Some(linv) = l.clone().try_inverse() else { return 0.0 };
        let m = sym(&(&linv * db * linv.transpose()));
        let lmin = m.symmetric_eigenvalues().min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    (0.95 * alpha).min(1.0)
}

fn axpy(x: &Blocks, a: f64, d: &Blocks) -> Blocks {
    x.iter().zip(d).map(|(p, q)| p + q * a).collect()
}

pub struct SolverOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 120, tol: 1e-10 }
    }
}

/// Solves the problem from an infeasible start `X = Z = ζI`, `y = 0`.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    let m = p.a.len();
    let n_total: usize = p.blocks.iter().sum();
    let c = dense(&p.blocks, &p.c);
    let amats: Vec<Blocks> = p.a.iter().map(|a| dense(&p.blocks, a)).collect();
    let scale = 1.0 + p.b.iter().fold(0.0f64, |s, v| s.max(v.abs())) + p.c.iter().fold(0.0f64, |s, e| s.max(e.v.abs()));
    let zeta = 10.0 * scale;
    let mut x: Blocks = p.blocks.iter().map(|&n| DMatrix::identity(n, n) * zeta).collect();
    let mut z: Blocks = x.clone();
    let mut y = DVector::<f64>::zeros(m);
    let bvec = DVector::from_vec(p.b.clone());

    let mut status = SdpStatus::Stalled;
    let mut iterations = 0;
    // Near a boundary optimum late iterates can lose accuracy, so the best
    // iterate seen is what gets returned.
    let mut best: Option<(f64, Blocks, DVector<f64>, Blocks, usize)> = None;
    for it in 0..opts.max_iter {
        iterations = it;
        let ax = DVector::from_iterator(m, p.a.iter().map(|a| inner(a, &x)));
        let rp = &bvec - &ax;
        let mut rd = c.clone();
        for (k, am) in amats.iter().enumerate() {
            for (r, a) in rd.iter_mut().zip(am) {
                *r -= a * y[k];
            }
        }
        for (r, zb) in rd.iter_mut().zip(&z) {
            *r -= zb;
        }
        let mu = dot(&x, &z) / n_total as f64;
        let pobj = dot(&c, &x);
        let dobj = bvec.dot(&y);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + bvec.norm());
        let dinf = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + scale);
        let err = rel_gap.max(pinf).max(dinf);
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, x.clone(), y.clone(), z.clone(), it));
        }
        if rel_gap < opts.tol && pinf < opts.tol && dinf < opts.tol {
            status = SdpStatus::Optimal;
            break;
        }

        let Some(zinv) = z.iter().map(|zb| zb.clone().try_inverse()).collect::<Option<Blocks>>() else { break };
        // Schur complement M_kl = tr(A_k X A_l Z⁻¹).
        let xaz: Vec<Blocks> = amats
            .iter()
            .map(|al| x.iter().zip(al).zip(&zinv).map(|((xb, ab), zb)| xb * ab * zb).collect())
            .collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            for l in k..m {
                let v = inner(&p.a[k], &xaz[l]);
                schur[(k, l)] = v;
                schur[(l, k)] = v;
            }
        }
        // Tiny regularisation keeps dependent constraints solvable.
        for k in 0..m {
            schur[(k, k)] += 1e-14 * (1.0 + schur[(k, k)].abs());
        }
        let Some(chol) = schur.clone().cholesky() else { break };

        let xrdz: Blocks = x.iter().zip(&rd).zip(&zinv).map(|((xb, rb), zb)| xb * rb * zb).collect();
        let direction = |sigma: f64, corr: Option<&Blocks>| {
            let target: Blocks = zinv.iter().map(|zb| zb * (sigma * mu)).collect();
            let mut rhs = DVector::from_iterator(m, (0..m).map(|k| p.b[k] - inner(&p.a[k], &target) + inner(&p.a[k], &xrdz)));
            if let Some(cm) = corr {
                for k in 0..m {
                    rhs[k] += inner(&p.a[k], cm);
                }
            }
            let dy = chol.solve(&rhs);
            let mut dz = rd.clone();
            for (k, am) in amats.iter().enumerate() {
                for (d, a) in dz.iter_mut().zip(am) {
                    *d -= a * dy[k];
                }
            }
            let dx: Blocks = (0..x.len())
                .map(|b| {
                    let mut d = &target[b] - &x[b] - &x[b] * &dz[b] * &zinv[b];
                    if let Some(cm) = corr {
                        d -= &cm[b];
                    }
                    sym(&d)
                })
                .collect();
            (dx, dy, dz)
        };

        let (dxa, _, dza) = direction(0.0, None);
        let ap = step_length(&x, &dxa);
        let ad = step_length(&z, &dza);
        let mu_aff = dot(&axpy(&x, ap, &dxa), &axpy(&z, ad, &dza)) / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let corr: Blocks = dxa.iter().zip(&dza).zip(&zinv).map(|((a, b), zi)| a * b * zi).collect();
        let (dx, dy, dz) = direction(sigma, Some(&corr));
        let ap = step_length(&x, &dx);
        let ad = step_length(&z, &dz);
        if ap == 0.0 && ad == 0.0 {
            break;
        }
        x = axpy(&x, ap, &dx);
        z = axpy(&z, ad, &dz);
        y += &dy * ad;
    }
    if status != SdpStatus::Optimal {
        if let Some((_, bx, by, bz, it)) = best {
            x = bx;
            y = by;
            z = bz;
            iterations = it;
        }
    }
    let primal_value = dot(&c, &x);
    let dual_value = bvec.dot(&y);
    SdpSolution { status, x, y: y.iter().copied().collect(), z, primal_value, dual_value, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp_as_diagonal_blocks() {
        // min x1 + 2 x2  s.t. x1 + x2 = 1, x ≥ 0  → value 1.
        let p = SdpProblem {
            blocks: vec![1, 1],
            c: vec![Entry { block: 0, i: 0, j: 0, v: 1.0 }, Entry { block: 1, i: 0, j: 0, v: 2.0 }],
            a: vec![vec![Entry { block: 0, i: 0, j: 0, v: 1.0 }, Entry { block: 1, i: 0, j: 0, v: 1.0 }]],
            b: vec![1.0],
        };
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 1.0).abs() < 1e-7);
        assert!((s.dual_value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn smallest_eigenvalue() {
        // min ⟨C, X⟩ with tr X = 1 gives λ_min(C) = 1 for C = [[2,1],[1,2]].
        let p = SdpProblem {
            blocks: vec![2],
            c: vec![Entry { block: 0, i: 0, j: 0, v: 2.0 }, Entry { block: 0, i: 0, j: 1, v: 1.0 }, Entry { block: 0, i: 1, j: 1, v: 2.0 }],
            a: vec![vec![Entry { block: 0, i: 0, j: 0, v: 1.0 }, Entry { block: 0, i: 1, j: 1, v: 1.0 }]],
            b: vec![1.0],
        };
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 1.0).abs() < 1e-7);
        assert!((s.x[0][(0, 1)] + 0.5).abs() < 1e-5);
    }
}
