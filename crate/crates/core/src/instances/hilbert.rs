use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::linalg::rank;
use crate::exact::rat::Rat;
use crate::groupring::{Exponent, GroupRingElement};

/// The support classes on which every nonnegative polynomial is a sum of
/// squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HilbertCase {
    Univariate,
    Quadratic,
    BinaryQuartic,
}

impl HilbertCase {
    pub const ALL: [HilbertCase; 3] = [HilbertCase::Univariate, HilbertCase::Quadratic, HilbertCase::BinaryQuartic];

    pub fn name(self) -> &'static str {
        match self {
            HilbertCase::Univariate => "univariate",
            HilbertCase::Quadratic => "quadratic",
            HilbertCase::BinaryQuartic => "binary-quartic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

fn combination(monomials: &[Vec<i64>], coeffs: &[i64]) -> GroupRingElement {
    let n = monomials[0].len();
    let mut q = GroupRingElement::zero(n);
    for (m, &c) in monomials.iter().zip(coeffs) {
        q.add_term(Exponent::from_ints(m), Rat::from_integer(c.into()));
    }
    q
}

/// Random coefficient vectors whose Gram matrix `Σ v vᵀ` has full rank, so
/// the resulting sum of squares lies in the interior of the SOS cone.
fn full_rank_frame(rng: &mut ChaCha8Rng, dim: usize, extra: usize) -> Vec<Vec<i64>> {
    loop {
        let count = dim + rng.gen_range(0..=extra);
        let frame: Vec<Vec<i64>> = (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let rows: Vec<Vec<Rat>> = frame.iter().map(|v| v.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect();
        if rank(&rows) == dim {
            return frame;
        }
    }
}

/// A random sum of squares within the support class of `case`. The squared
/// polynomials span the whole monomial basis, so the instance has a positive
/// definite Gram matrix and is a sum of squares at `d = 1` by construction.
pub fn hilbert_sampler(case: HilbertCase, seed: u64) -> GroupRingElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis: Vec<Vec<i64>> = match case {
        HilbertCase::Univariate => {
            let k = rng.gen_range(1..=3);
            (0..=k).map(|i| vec![i]).collect()
        }
        HilbertCase::Quadratic => {
            let n = rng.gen_range(2..=4);
            let mut b = vec![vec![0; n]];
            b.extend((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()));
            b
        }
        HilbertCase::BinaryQuartic => vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]],
    };
    let frame = full_rank_frame(&mut rng, basis.len(), 2);
    let n = basis[0].len();
    let mut p = GroupRingElement::zero(n);
    for v in &frame {
        p = p.add(&combination(&basis, v).square()).expect("same dimension");
    }
    p
}
