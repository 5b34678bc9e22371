//! Canonical test instances: the Motzkin and Horn polynomials, Motzkin–Straus
//! matrices of graphs, circuit supports and random sums of squares.

pub mod circuit;
pub mod graph;
pub mod hilbert;

pub use circuit::{circuit_detect, CircuitReport};
pub use graph::{motzkin_straus_matrix, odd_cycle_instance, stability_number, CopositeInstance, Graph, MAX_STABILITY_VERTICES};
pub use hilbert::{hilbert_sampler, HilbertCase};

use crate::exact::rat::Rat;
use crate::exact::SymRatMatrix;
use crate::groupring::{Exponent, GroupRingElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("graph has {0} vertices; exact stability numbers are limited to {MAX_STABILITY_VERTICES}")]
    TooLarge(usize),
    #[error("odd cycle instances need an odd length of at least five, got {0}")]
    EvenOrSmall(usize),
    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),
}

/// `M = x3⁶ − 3x1²x2²x3² + x1²x2⁴ + x1⁴x2²`.
pub fn motzkin() -> GroupRingElement {
    GroupRingElement::from_int_terms(3, &[(1, &[0, 0, 6]), (-3, &[2, 2, 2]), (1, &[2, 4, 0]), (1, &[4, 2, 0])])
}

/// `2(x1³x2³ − x1x2x3⁴)² + (x1⁴x2² − x1²x2⁴)² + (x3⁶ − x1²x2²x3²)²`.
pub fn motzkin_three_squares() -> GroupRingElement {
    let t = |c: i64, e: &[i64]| GroupRingElement::from_int_terms(3, &[(c, e)]);
    let a = t(1, &[3, 3, 0]).sub(&t(1, &[1, 1, 4])).expect("same dimension");
    let b = t(1, &[4, 2, 0]).sub(&t(1, &[2, 4, 0])).expect("same dimension");
    let c = t(1, &[0, 0, 6]).sub(&t(1, &[2, 2, 2])).expect("same dimension");
    a.square().scale(&Rat::from_integer(2.into())).add(&b.square()).and_then(|s| s.add(&c.square())).expect("same dimension")
}

/// The Horn matrix: ones everywhere except `−1` on the 5-cycle entries.
pub fn horn_matrix() -> SymRatMatrix {
    let mut q = SymRatMatrix::from_fn(5, |_, _| Rat::from_integer(1.into()));
    for i in 0..5 {
        let j = (i + 1) % 5;
        q.set(i, j, Rat::from_integer((-1).into()));
        q.set(j, i, Rat::from_integer((-1).into()));
    }
    q
}

/// `h = (x1 + … + x5)² − 4(x1x2 + x2x3 + x3x4 + x4x5 + x5x1)`.
pub fn horn() -> GroupRingElement {
    quadratic_form(&horn_matrix())
}

/// `xᵀQx` as a polynomial.
pub fn quadratic_form(q: &SymRatMatrix) -> GroupRingElement {
    let n = q.dim();
    let mut p = GroupRingElement::zero(n);
    for i in 0..n {
        for j in 0..n {
            let e = &Exponent::unit(n, i) + &Exponent::unit(n, j);
            p.add_term(e, q.get(i, j).clone());
        }
    }
    p
}

/// `(x²)ᵀ Q (x²) = Σ Q_ij x_i² x_j²`, nonnegative everywhere exactly when `Q`
/// is copositive.
pub fn even_quadratic_form(q: &SymRatMatrix) -> GroupRingElement {
    quadratic_form(q).psi_d(2)
}
