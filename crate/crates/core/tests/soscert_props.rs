use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadow_obstruct::exact::Rat;
use shadow_obstruct::groupring::{parse_element, GroupRingElement};
use shadow_obstruct::instances::{hilbert_sampler, motzkin, HilbertCase};
use shadow_obstruct::soscert::{sigma_d_check, sos_check, Certificate, CertificateJson, SosOptions, SosOutcome, Verdict};

fn corpus() -> Vec<GroupRingElement> {
    let mut v: Vec<GroupRingElement> = [
        "x1^4 - 2*x1^2*x2^2 + x2^4",
        "x1^2 - 2*x1 + 1",
        "x1^2*x2^4 + x1^4*x2^2 - 3*x1^2*x2^2 + 1",
        "x1^2 + x2^2 + 2*x1*x2 + 1",
        "x1^6 + x2^6 - x1^2*x2^2",
    ]
    .iter()
    .map(|s| parse_element(s, None).unwrap())
    .collect();
    v.push(motzkin());
    for case in HilbertCase::ALL {
        v.push(hilbert_sampler(case, 11));
    }
    v
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rat> {
    (0..n).map(|_| Rat::new(BigInt::from(rng.gen_range(-30i64..=30)), BigInt::from(rng.gen_range(1i64..=9)))).collect()
}

#[test]
fn passes_are_monotone_and_sound() {
    let opts = SosOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut passes = 0;
    for p in corpus() {
        for d in [1u64, 2] {
            let r = sigma_d_check(&p, d, &opts).unwrap();
            if r.verdict != Verdict::Pass {
                continue;
            }
            passes += 1;
            let r2 = sigma_d_check(&p, 2 * d, &opts).unwrap();
            assert_eq!(r2.verdict, Verdict::Pass, "{p} passes at d = {d} but not at {}", 2 * d);
            for _ in 0..1000 {
                let x = random_point(&mut rng, p.dim());
                assert!(!p.eval_rational(&x).unwrap().is_negative(), "{p} negative at {x:?}");
            }
            break;
        }
    }
    assert!(passes >= 8, "only {passes} corpus entries passed");
}

#[test]
fn every_distinct_branch_certificate_verifies() {
    let opts = SosOptions::default();
    for p in [motzkin(), parse_element("x1^2 - 2*x1 + 1", None).unwrap()] {
        for d in [1u64, 2] {
            let r = sigma_d_check(&p, d, &opts).unwrap();
            for (i, o) in r.distinct() {
                let c = o.certificate().unwrap_or_else(|| panic!("branch {i} of {p} at d = {d} inconclusive"));
                c.verify().unwrap();
                assert_eq!(c.target(), &r.branches[i].polynomial);
            }
        }
    }
}

fn round_trip(c: &Certificate) -> Certificate {
    let text = serde_json::to_string(&c.to_json()).unwrap();
    Certificate::parse(&text).unwrap()
}

#[test]
fn certificates_round_trip_and_tampering_is_caught() {
    let opts = SosOptions::default();
    let sos = sos_check(&motzkin().psi_d(2), &opts).unwrap().certificate().unwrap();
    assert_eq!(round_trip(&sos), sos);
    round_trip(&sos).verify().unwrap();
    let mut j = serde_json::to_value(sos.to_json()).unwrap();
    let g = &mut j["gram"][0][0];
    *g = serde_json::Value::String(format!("{}1", g.as_str().unwrap()));
    let bad = Certificate::from_json(&serde_json::from_value::<CertificateJson>(j).unwrap()).unwrap();
    assert!(bad.verify().is_err());

    let horn4 = shadow_obstruct::instances::even_quadratic_form(&shadow_obstruct::instances::horn_matrix());
    let dual = sos_check(&horn4, &opts).unwrap().certificate().unwrap();
    assert!(matches!(dual, Certificate::Dual(_)));
    assert_eq!(round_trip(&dual), dual);
    let mut j = serde_json::to_value(dual.to_json()).unwrap();
    j["value"] = serde_json::Value::String("-1".into());
    let bad = Certificate::from_json(&serde_json::from_value::<CertificateJson>(j).unwrap()).unwrap();
    assert!(bad.verify().is_err());
}

#[test]
fn hilbert_samples_pass_at_d1() {
    let opts = SosOptions::default();
    for case in HilbertCase::ALL {
        for seed in 0..4 {
            let p = hilbert_sampler(case, seed);
            let r = sigma_d_check(&p, 1, &opts).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{} seed {seed}: {p}", case.name());
        }
    }
}

#[test]
fn negative_somewhere_is_never_sos() {
    let opts = SosOptions::default();
    for s in ["x1^2 - 1", "x1^4 - x1^2", "x1^2*x2^2 - x1*x2", "-1", "x1^2 + x2^2 - 3*x1*x2"] {
        let p = parse_element(s, None).unwrap();
        match sos_check(&p, &opts).unwrap() {
            SosOutcome::NotSos(c) => c.verify().unwrap(),
            other => panic!("{s}: {other:?}"),
        }
    }
}

#[test]
fn three_square_decomposition_as_gram_certificate() {
    use shadow_obstruct::exact::{psd_check, PsdStatus, SymRatMatrix};
    use shadow_obstruct::groupring::SupportSet;
    use shadow_obstruct::soscert::SosCertificate;

    // 2(a − b)² + (c − e)² + (f − g)² over the monomials below.
    let (a, b, c, e, f, g) = (vec![3, 3, 0], vec![1, 1, 4], vec![4, 2, 0], vec![2, 4, 0], vec![0, 0, 6], vec![2, 2, 2]);
    let basis = SupportSet::new(3, vec![a.clone(), b.clone(), c.clone(), e.clone(), f.clone(), g.clone()]).unwrap();
    let idx = |m: &Vec<i64>| basis.points.iter().position(|p| p == m).unwrap();
    let mut gram = SymRatMatrix::zeros(6);
    let int = |v: i64| Rat::from_integer(BigInt::from(v));
    for (w, p, q) in [(2, &a, &b), (1, &c, &e), (1, &f, &g)] {
        gram.set(idx(p), idx(p), int(w));
        gram.set(idx(q), idx(q), int(w));
        gram.set(idx(p), idx(q), int(-w));
        gram.set(idx(q), idx(p), int(-w));
    }
    assert_eq!(psd_check(&gram).status, PsdStatus::PositiveSemidefinite);
    assert_eq!(gram.rank(), 3);
    let cert = SosCertificate { target: motzkin().psi_d(2), basis, gram, psd: PsdStatus::PositiveSemidefinite };
    cert.verify().unwrap();
    assert_eq!(cert.squares().len(), 3);
    assert!(Certificate::Sos(cert).verify().is_ok());
}
