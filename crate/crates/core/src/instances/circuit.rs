use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::exact::linalg::{rank, solve};
use crate::exact::lp::convex_weights;
use crate::exact::rat::{serde_rat_vec, Rat};
use crate::groupring::SupportSet;

/// Result of testing whether a support set is a circuit: the vertices of its
/// convex hull form a simplex of even lattice points, and at most one further
/// point lies in the relative interior.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitReport {
    pub is_circuit: bool,
    /// Vertices of the convex hull, in support order.
    pub vertices: Vec<Vec<i64>>,
    pub interior: Option<Vec<i64>>,
    /// Barycentric coordinates of `interior` with respect to `vertices`.
    #[serde(with = "serde_rat_vec")]
    pub barycentric: Vec<Rat>,
    pub reason: Option<String>,
}

fn to_rats(p: &[i64]) -> Vec<Rat> {
    p.iter().map(|&x| Rat::from_integer(x.into())).collect()
}

pub fn circuit_detect(s: &SupportSet) -> CircuitReport {
    let pts = &s.points;
    let mut vertices = Vec::new();
    let mut others = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let rest: Vec<Vec<Rat>> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| to_rats(q)).collect();
        if !rest.is_empty() && convex_weights(&rest, &to_rats(p)).is_some() {
            others.push(p.clone());
        } else {
            vertices.push(p.clone());
        }
    }
    let fail = |vertices: Vec<Vec<i64>>, reason: &str| CircuitReport {
        is_circuit: false,
        vertices,
        interior: None,
        barycentric: Vec::new(),
        reason: Some(reason.to_string()),
    };
    if vertices.is_empty() {
        return fail(vertices, "empty support");
    }
    let diffs: Vec<Vec<Rat>> =
        vertices[1..].iter().map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| Rat::from_integer((a - b).into())).collect()).collect();
    if rank(&diffs) != vertices.len() - 1 {
        return fail(vertices, "vertices are affinely dependent");
    }
    if vertices.iter().flatten().any(|x| x % 2 != 0) {
        return fail(vertices, "a vertex is not in 2Z^n");
    }
    match others.len() {
        0 => CircuitReport { is_circuit: true, vertices, interior: None, barycentric: Vec::new(), reason: None },
        1 => {
            let w = others.pop().expect("one point");
            // Barycentric coordinates: Σλ_i v_i = w, Σλ_i = 1.
            let k = vertices.len();
            let dim = w.len();
            let mut a: Vec<Vec<Rat>> = (0..dim).map(|r| vertices.iter().map(|v| Rat::from_integer(v[r].into())).collect()).collect();
            a.push(vec![Rat::from_integer(1.into()); k]);
            let mut b = to_rats(&w);
            b.push(Rat::from_integer(1.into()));
            match solve(&a, &b) {
                Some(l) if l.iter().all(|x| x.is_positive()) => {
                    CircuitReport { is_circuit: true, vertices, interior: Some(w), barycentric: l, reason: None }
                }
                _ => fail(vertices, "non-vertex point is not in the relative interior"),
            }
        }
        _ => fail(vertices, "more than one non-vertex point"),
    }
}

impl CircuitReport {
    pub fn weights_sum_to_one(&self) -> bool {
        self.barycentric.is_empty() || self.barycentric.iter().fold(Rat::zero(), |s, x| s + x) == Rat::from_integer(1.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;
    use crate::groupring::SupportSet;
    use crate::instances::{horn, motzkin};

    #[test]
    fn motzkin_is_a_circuit() {
        let r = circuit_detect(&SupportSet::of(&motzkin()).unwrap());
        assert!(r.is_circuit);
        assert_eq!(r.vertices, vec![vec![0, 0, 6], vec![2, 4, 0], vec![4, 2, 0]]);
        assert_eq!(r.interior, Some(vec![2, 2, 2]));
        assert_eq!(r.barycentric, vec![rat(1, 3); 3]);
        assert!(r.weights_sum_to_one());
    }

    #[test]
    fn small_and_negative_cases() {
        let r = circuit_detect(&SupportSet::new(1, vec![vec![0], vec![1], vec![2]]).unwrap());
        assert!(r.is_circuit);
        assert_eq!(r.barycentric, vec![rat(1, 2), rat(1, 2)]);
        let h = circuit_detect(&SupportSet::of(&horn()).unwrap());
        assert!(!h.is_circuit);
        assert_eq!(h.vertices.len(), 5);
        let odd = circuit_detect(&SupportSet::new(1, vec![vec![1], vec![3]]).unwrap());
        assert!(!odd.is_circuit);
        let edge = circuit_detect(&SupportSet::new(2, vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 0]]).unwrap());
        assert!(!edge.is_circuit);
    }
}
