use std::collections::BTreeSet;

use num_traits::One;

use super::{even_quadratic_form, InstanceError};
use crate::exact::rat::Rat;
use crate::exact::SymRatMatrix;
use crate::groupring::GroupRingElement;

pub const MAX_STABILITY_VERTICES: usize = 30;

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, InstanceError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(InstanceError::BadEdge(a, b));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn cycle(m: usize) -> Self {
        Graph::new(m, (0..m).map(|i| (i, (i + 1) % m))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("valid complete graph")
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: BTreeSet::new() }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn neighbour_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }
}

/// The largest size of a set of pairwise non-adjacent vertices, by branch and
/// bound on bitmasks: branch on a vertex of the candidate set, either taking
/// it (dropping its neighbours) or discarding it.
pub fn stability_number(g: &Graph) -> Result<usize, InstanceError> {
    if g.n > MAX_STABILITY_VERTICES {
        return Err(InstanceError::TooLarge(g.n));
    }
    let adj = g.neighbour_masks();
    let all = if g.n == 64 { u64::MAX } else { (1u64 << g.n) - 1 };
    let mut best = 0;
    branch(&adj, all, 0, &mut best);
    Ok(best)
}

fn branch(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() as usize <= *best {
        return;
    }
    // Vertices without candidate neighbours can always be taken.
    let v = cand.trailing_zeros() as usize;
    if adj[v] & cand == 0 {
        branch(adj, cand & !(1 << v), size + 1, best);
        return;
    }
    branch(adj, cand & !(1 << v) & !adj[v], size + 1, best);
    branch(adj, cand & !(1 << v), size, best);
}

/// `Q(G) = α(G)(I + A) − J`.
pub fn motzkin_straus_matrix(g: &Graph) -> Result<SymRatMatrix, InstanceError> {
    let alpha = Rat::from_integer(stability_number(g)?.into());
    Ok(SymRatMatrix::from_fn(g.n, |i, j| {
        let ia = if i == j || g.has_edge(i, j) { alpha.clone() } else { Rat::from_integer(0.into()) };
        ia - Rat::one()
    }))
}

/// A copositive matrix together with its even quartic form.
#[derive(Clone, Debug, PartialEq)]
pub struct CopositeInstance {
    pub q: SymRatMatrix,
    pub p: GroupRingElement,
    pub alpha: usize,
}

impl CopositeInstance {
    pub fn from_matrix(q: SymRatMatrix, alpha: usize) -> Self {
        let p = even_quadratic_form(&q);
        CopositeInstance { q, p, alpha }
    }
}

/// `Q(C_m)` for an odd cycle of length `m ≥ 5`, where `α(C_m) = (m − 1)/2`.
pub fn odd_cycle_instance(m: usize) -> Result<CopositeInstance, InstanceError> {
    if m < 5 || m % 2 == 0 {
        return Err(InstanceError::EvenOrSmall(m));
    }
    let g = Graph::cycle(m);
    let q = motzkin_straus_matrix(&g)?;
    let alpha = stability_number(&g)?;
    Ok(CopositeInstance::from_matrix(q, alpha))
}
