use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;
use shadow_obstruct::exact::Rat;
use shadow_obstruct::groupring::{parse_element, Exponent, GroupRingElement};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rat::new(BigInt::from(p), BigInt::from(q)))
}

fn element(n: usize, frac: bool) -> impl Strategy<Value = GroupRingElement> {
    let exp = if frac {
        prop::collection::vec((0i64..=4, 1i64..=3).prop_map(|(p, q)| Rat::new(p.into(), q.into())), n).boxed()
    } else {
        prop::collection::vec((0i64..=3).prop_map(|p| Rat::from_integer(p.into())), n).boxed()
    };
    prop::collection::vec((small_rat(), exp), 0..5)
        .prop_map(move |ts| GroupRingElement::from_terms(n, ts.into_iter().map(|(c, e)| (c, Exponent(e)))).unwrap())
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((1i64..=9, 1i64..=5).prop_map(|(p, q)| Rat::new(p.into(), q.into())), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in element(2, true), b in element(2, true), c in element(2, true)) {
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn psi_is_multiplicative_and_composes(a in element(2, true), b in element(2, true), d in 1u64..4, e in 1u64..4) {
        prop_assert_eq!(a.mul(&b).unwrap().psi_d(d), a.psi_d(d).mul(&b.psi_d(d)).unwrap());
        prop_assert_eq!(a.psi_d(d).psi_d(e), a.psi_d(d * e));
        prop_assert_eq!(a.psi_d(d).psi_d_inverse(d), a.clone());
        prop_assert_eq!(a.add(&b).unwrap().psi_d(d), a.psi_d(d).add(&b.psi_d(d)).unwrap());
    }

    #[test]
    fn psi_matches_evaluation(a in element(2, false), d in 1u64..4, x in point(2)) {
        let lhs = a.psi_d(d).eval_positive(&x, 64).unwrap();
        let xd: Vec<Rat> = x.iter().map(|v| num_traits::pow(v.clone(), d as usize)).collect();
        let rhs = a.eval_positive(&xd, 64).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn phi_is_a_linear_involution(a in element(3, false), b in element(3, false), s in prop::collection::vec(prop_oneof![Just(-1i8), Just(1i8)], 3)) {
        prop_assert_eq!(a.phi_s(&s).unwrap().phi_s(&s).unwrap(), a.clone());
        prop_assert_eq!(a.add(&b).unwrap().phi_s(&s).unwrap(), a.phi_s(&s).unwrap().add(&b.phi_s(&s).unwrap()).unwrap());
        let x: Vec<Rat> = (1..=3).map(|v| Rat::from_integer(v.into())).collect();
        let sx: Vec<Rat> = x.iter().zip(&s).map(|(v, &si)| if si < 0 { -v.clone() } else { v.clone() }).collect();
        prop_assert_eq!(a.phi_s(&s).unwrap().eval_rational(&x).unwrap(), a.eval_rational(&sx).unwrap());
    }

    #[test]
    fn squares_are_nonnegative(a in element(2, true), x in point(2)) {
        let v = a.square().eval_positive(&x, 64).unwrap().as_interval();
        prop_assert!(!v.certainly_negative());
        if let Some(r) = a.square().eval_positive(&x, 64).unwrap().exact() {
            prop_assert!(!r.is_negative());
        }
    }

    #[test]
    fn text_roundtrip(a in element(3, true)) {
        let shown = a.to_string();
        let back = parse_element(&shown, Some(3)).unwrap();
        prop_assert_eq!(back, a.clone());
        let j = serde_json::to_string(&a.to_json()).unwrap();
        prop_assert_eq!(shadow_obstruct::groupring::parse_any(&j).unwrap(), a);
    }
}

#[test]
fn horn_after_psi_2() {
    let linear = parse_element("x1 + x2 + x3 + x4 + x5", None).unwrap();
    let cyc = parse_element("4*x1*x2 + 4*x2*x3 + 4*x3*x4 + 4*x4*x5 + 4*x5*x1", None).unwrap();
    let h = linear.square().sub(&cyc).unwrap();
    let squares = parse_element("x1^2 + x2^2 + x3^2 + x4^2 + x5^2", None).unwrap();
    let cyc2 = parse_element("4*x1^2*x2^2 + 4*x2^2*x3^2 + 4*x3^2*x4^2 + 4*x4^2*x5^2 + 4*x5^2*x1^2", None).unwrap();
    assert_eq!(h.psi_d(2), squares.square().sub(&cyc2).unwrap());
    assert_eq!(h.psi_d(2).coeff(&Exponent::from_ints(&[4, 0, 0, 0, 0])), Rat::one());
}
