//! One PASS/FAIL line per acceptance criterion, with the time taken and the
//! time budget. Runs without the libtest harness so every line is printed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadow_obstruct::exact::{parse_rat, psd_check, PsdStatus, Rat, SymRatMatrix};
use shadow_obstruct::groupring::{parse_element, Exponent, SupportSet};
use shadow_obstruct::hahn::{
    psd_check_hahn, residue_matrix, test_k_positivity, CoefMap, HahnSeries, KPositivityConfig, LemmaStatus, Template, TrialOutcome,
    Valuation,
};
use shadow_obstruct::instances::{circuit_detect, hilbert_sampler, motzkin, odd_cycle_instance, HilbertCase};
use shadow_obstruct::interval::ln_rat;
use shadow_obstruct::posdef::{gram_matrix, hankel_matrix, ExpSumFunction, HankelVerdict, MomentFunction};
use shadow_obstruct::soscert::{
    copositivity_cert, horn_restriction_check, sigma_d_check, sonc_reznick_pass, Certificate, SosOptions, SosOutcome, Verdict,
};

type Check = Result<String, String>;

fn r(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Check {
    let squares = [("2", "x1^3*x2^3 - x1*x2*x3^4"), ("1", "x1^4*x2^2 - x1^2*x2^4"), ("1", "x3^6 - x1^2*x2^2*x3^2")];
    let mut sum = parse_element("0", Some(3)).map_err(|e| e.to_string())?;
    for (c, q) in squares {
        let q = parse_element(q, Some(3)).map_err(|e| e.to_string())?;
        sum = sum.add(&q.square().scale(&parse_rat(c).unwrap())).map_err(|e| e.to_string())?;
    }
    let residual = sum.sub(&motzkin().psi_d(2)).map_err(|e| e.to_string())?;
    ensure(residual.is_zero(), format!("residual {residual}"))?;
    Ok("2(x1³x2³ − x1x2x3⁴)² + (x1⁴x2² − x1²x2⁴)² + (x3⁶ − x1²x2²x3²)² = M(x1², x2², x3²), residual 0".into())
}

fn criterion_2() -> Check {
    let f = ExpSumFunction::f_epsilon(&[r(2, 1), r(3, 1)], &r(1, 11)).map_err(|e| e.to_string())?;
    let g = gram_matrix(&f, &[r(5, 1), r(6, 1), r(7, 1)], 64).map_err(|e| e.to_string())?;
    let m = g.exact.ok_or("Gram matrix is not exact")?;
    let printed = [
        ((0, 0), "39956170693955/665127936"),
        ((0, 1), "715125242123209/3990767616"),
        ((0, 2), "12823220129727323/23944605696"),
        ((1, 2), "230229525738486289/143667634176"),
        ((2, 2), "4137070068201557555/862005805056"),
        ((1, 1), "12823220129727323/23944605696"),
    ];
    for ((i, j), v) in printed {
        ensure(*m.get(i, j) == parse_rat(v).unwrap(), format!("entry ({}, {}) differs", i + 1, j + 1))?;
    }
    ensure(m.det() == parse_rat("-2277541160576348197/107750725632").unwrap(), "determinant differs")?;

    let h = ExpSumFunction::new(vec![(r(1, 1), r(2, 1)), (r(1, 1), r(3, 1))], r(-1, 11)).map_err(|e| e.to_string())?;
    let s = hankel_matrix(&h, &Rat::zero(), 2, &r(1, 1_000_000)).map_err(|e| e.to_string())?;
    let det = s.det();
    ensure(det.width() <= r(1, 1_000_000), "enclosure wider than 1e-6")?;
    ensure(s.verdict == HankelVerdict::PositiveDefinite && det.certainly_positive(), "determinant not certified positive")?;
    // (21/11)(ln²2 + ln²3) − (ln2 + ln3)², evaluated independently.
    let (l2, l3) = (ln_rat(&r(2, 1), 128), ln_rat(&r(3, 1), 128));
    let closed = l2.square().add(&l3.square()).scale(&r(21, 11)).sub(&l2.add(&l3).square());
    let overlap = det.lo() <= closed.hi() && closed.lo() <= det.hi();
    ensure(overlap, format!("enclosure {det:?} misses the closed form {closed:?}"))?;
    ensure((det.mid_f64() - 0.011).abs() < 5e-4, "determinant does not round to 0.011")?;
    Ok(format!("six Gram entries and det = −2277541160576348197/107750725632 exact; Hankel det ≈ {:.6} > 0", det.mid_f64()))
}

fn criterion_3() -> Check {
    for d in 1..=2 {
        let rep = horn_restriction_check(d).map_err(|e| e.to_string())?;
        ensure(rep.restrictions.len() == 5 && rep.all_hold, format!("restriction fails at d = {d}"))?;
        ensure(rep.value_at_e1 == "1", format!("H_{d}(e1) = {}", rep.value_at_e1))?;
    }
    Ok("five restrictions exact at d = 1, 2; H_d(1,0,0,0,0) = 1".into())
}

fn verified(o: &SosOutcome, dual: bool) -> Result<Certificate, String> {
    let c = o.certificate().ok_or("no certificate")?;
    ensure(matches!(c, Certificate::Dual(_)) == dual, "wrong certificate kind")?;
    c.verify().map_err(|e| e.to_string())?;
    Ok(c)
}

fn criterion_4(certs: &mut Vec<Certificate>) -> Check {
    let opts = SosOptions::default();
    let m1 = sigma_d_check(&motzkin(), 1, &opts).map_err(|e| e.to_string())?;
    ensure(m1.verdict == Verdict::Fail, "Motzkin d = 1 not refuted")?;
    for (_, o) in m1.distinct() {
        certs.push(verified(o, true)?);
    }
    let m2 = sigma_d_check(&motzkin(), 2, &opts).map_err(|e| e.to_string())?;
    ensure(m2.verdict == Verdict::Pass, "Motzkin d = 2 not certified")?;
    for (_, o) in m2.distinct() {
        certs.push(verified(o, false)?);
    }
    let c5 = odd_cycle_instance(5).map_err(|e| e.to_string())?;
    let rep = copositivity_cert(&c5.q, 2, &opts).map_err(|e| e.to_string())?;
    ensure(rep.levels.len() == 2 && rep.first_pass.is_none(), "Q(C5) levels incomplete")?;
    for (_, o) in &rep.levels {
        certs.push(verified(o, true)?);
    }
    Ok("Motzkin: dual at d = 1, SOS at d = 2; Q(C5): duals at d = 1, 2; all exact".into())
}

fn random_series(rng: &mut ChaCha8Rng, lo: i64) -> HahnSeries {
    loop {
        let k = rng.gen_range(1..4);
        let terms: Vec<(Exponent, Rat)> = (0..k)
            .map(|_| (Exponent(vec![r(rng.gen_range(lo..=6), rng.gen_range(1..=2))]), r(rng.gen_range(1..=4) * if rng.gen() { 1 } else { -1 }, 1)))
            .collect();
        let s = HahnSeries::from_terms(1, terms, None).unwrap();
        if !s.is_zero_to_trunc() {
            return s;
        }
    }
}

/// `c + (positive-valuation tail)`.
fn bounded_series(rng: &mut ChaCha8Rng, c: i64) -> HahnSeries {
    let tail: Vec<(Exponent, Rat)> = (0..rng.gen_range(0..3)).map(|_| (Exponent(vec![r(rng.gen_range(1..=6), rng.gen_range(1..=2))]), r(rng.gen_range(-3..=3), 1))).collect();
    HahnSeries::constant(1, r(c, 1)).add(&HahnSeries::from_terms(1, tail, None).unwrap()).unwrap()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let cut = Exponent(vec![r(8, 1)]);
    let mut checks = 0;
    for _ in 0..100 {
        let (a, b) = (random_series(&mut rng, -3), random_series(&mut rng, -3));
        let (va, vb) = (a.valuation().finite().cloned().unwrap(), b.valuation().finite().cloned().unwrap());
        ensure(a.mul(&b).unwrap().valuation() == Valuation::Finite(&va + &vb), "v(ab) != v(a) + v(b)")?;
        let low = if a.valuation() < b.valuation() { a.valuation() } else { b.valuation() };
        ensure(a.add(&b).unwrap().valuation() >= low, "v(a+b) < min")?;
        let prod = a.mul(&a.inverse(&cut).unwrap()).unwrap();
        ensure(prod.terms() == HahnSeries::one(1).terms(), "a·a⁻¹ != 1 to the cutoff")?;
        checks += 3;
    }
    for _ in 0..100 {
        // Gram matrices of vectors over the valuation ring.
        let vectors: Vec<Vec<HahnSeries>> =
            (0..rng.gen_range(1..4)).map(|_| (0..3)
                .map(|_| {
                    let c = rng.gen_range(-3..=3);
                    bounded_series(&mut rng, c)
                })
                .collect()).collect();
        let a = shadow_obstruct::hahn::gram_of(&vectors).unwrap();
        ensure(psd_check_hahn(&a).unwrap().status.is_psd(), "Gram matrix not PSD")?;
        let pi = SymRatMatrix::from_rows(residue_matrix(&a).unwrap()).unwrap();
        ensure(psd_check(&pi).status.is_psd(), "residue of PSD not PSD")?;
        // A PD residue lifts to a PD matrix.
        let mut m = vec![vec![HahnSeries::zero(1); 3]; 3];
        let off = rng.gen_range(-1..=1);
        for i in 0..3 {
            for j in i..3 {
                let c = if i == j { 2 * rng.gen_range(1..5) } else if (i, j) == (0, 1) { off } else { 0 };
                let v = bounded_series(&mut rng, c);
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        let res = SymRatMatrix::from_rows(residue_matrix(&m).unwrap()).unwrap();
        ensure(psd_check(&res).status == PsdStatus::PositiveDefinite, "residue not PD")?;
        ensure(psd_check_hahn(&m).unwrap().status == PsdStatus::PositiveDefinite, "PD residue did not lift")?;
        checks += 2;
    }
    let eps = |k: i64| HahnSeries::eps_pow(Exponent::from_ints(&[k]));
    let a = vec![vec![eps(1), HahnSeries::one(1)], vec![HahnSeries::one(1), eps(-1)]];
    ensure(psd_check_hahn(&a).unwrap().status == PsdStatus::PositiveSemidefinite, "[[ε,1],[1,1/ε]] not PSD")?;
    let neg = vec![vec![eps(1).neg()]];
    ensure(psd_check_hahn(&neg).unwrap().status == PsdStatus::Indefinite, "[[−ε]] not indefinite")?;
    let pi = SymRatMatrix::from_rows(residue_matrix(&neg).unwrap()).unwrap();
    ensure(psd_check(&pi).status.is_psd(), "residue of [[−ε]] not PSD")?;
    ensure(checks == 500, "wrong check count")?;
    Ok(format!("{checks} randomized checks; [[ε,1],[1,1/ε]] PSD; [[−ε]] indefinite with PSD residue"))
}

fn criterion_6() -> Check {
    let moment = CoefMap::univariate(Template::Moment(MomentFunction::new(Rat::zero(), Rat::one()).unwrap()));
    let mut rates = Vec::new();
    for k in 1..=3 {
        let mut cfg = KPositivityConfig::new(k, 100, 2024 + k as u64);
        cfg.lemma_points = (-4..=4).map(|a| Exponent::from_ints(&[a])).collect();
        let rep = test_k_positivity(&moment, &cfg).map_err(|e| e.to_string())?;
        ensure(rep.pass(), format!("moment map violated at k = {k}"))?;
        ensure(rep.inconclusive_rate() < 0.05, format!("k = {k}: {} inconclusive", rep.inconclusive))?;
        rates.push(rep.inconclusive);
    }
    let f = ExpSumFunction::f_epsilon(&[r(2, 1), r(3, 1)], &r(1, 11)).unwrap();
    let karlin = CoefMap::univariate(Template::ExpSum(f));
    let mut cfg = KPositivityConfig::new(3, 0, 0);
    cfg.lemma_points = (-10..=10).map(|a| Exponent::from_ints(&[a])).collect();
    cfg.probes = vec![[5, 6, 7].iter().map(|&k| Exponent::from_ints(&[k])).collect()];
    let rep = test_k_positivity(&karlin, &cfg).map_err(|e| e.to_string())?;
    ensure(rep.probes[0].outcome == TrialOutcome::Violated, "f_{1/11} not violated at {5,6,7}")?;
    ensure(rep.lemma.len() == 21 && rep.lemma.iter().all(|c| c.status == LemmaStatus::Holds && c.radius == "0"), "f(a)f(−a) ≥ 1 not exact")?;
    Ok(format!("moment map k ≤ 3 over 100 trials (inconclusive {rates:?}); f_1/11 fails at {{5,6,7}}; f(a)f(−a) ≥ 1 exact on [−10, 10]"))
}

fn criterion_7(certs: &mut Vec<Certificate>) -> Check {
    let opts = SosOptions::default();
    for case in HilbertCase::ALL {
        for seed in 0..20 {
            let p = hilbert_sampler(case, seed);
            let rep = sigma_d_check(&p, 1, &opts).map_err(|e| e.to_string())?;
            ensure(rep.verdict == Verdict::Pass, format!("{} seed {seed} did not pass", case.name()))?;
            for (_, o) in rep.distinct() {
                certs.push(verified(o, false)?);
            }
        }
    }
    Ok("60 samples (20 per case) pass at d = 1 with exact Gram certificates".into())
}

fn criterion_8() -> Check {
    let rep = circuit_detect(&SupportSet::of(&motzkin()).map_err(|e| e.to_string())?);
    ensure(rep.is_circuit, "Motzkin support not a circuit")?;
    ensure(rep.barycentric == vec![r(1, 3); 3], "barycentric coordinates differ")?;
    ensure(rep.interior.as_deref() == Some(&[2, 2, 2][..]), "interior point differs")?;
    let rz = sonc_reznick_pass(&motzkin(), &SosOptions::default()).map_err(|e| e.to_string())?;
    ensure(rz.d == 2 && rz.passes(), "Reznick pass failed")?;
    for (_, o) in rz.sigma.distinct() {
        verified(o, false)?;
    }
    Ok("circuit with interior (2,2,2) and barycentric (1/3, 1/3, 1/3); certified at d = 2".into())
}

fn verify_with_cli(dir: &Path, name: &str, certs: &[Certificate]) -> Result<usize, String> {
    let path = dir.join(name);
    let bundle = serde_json::json!({ "certificates": certs.iter().map(|c| c.to_json()).collect::<Vec<_>>() });
    std::fs::write(&path, bundle.to_string()).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_shadow-obstruct")).args(["verify", "--json"]).arg(&path).output().map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["all_valid"] == true, format!("{name}: some certificate rejected"))?;
    let n = v["certificates"].as_array().map_or(0, |a| a.len());
    ensure(n == certs.len(), format!("{name}: checked {n} of {}", certs.len()))?;
    Ok(n)
}

fn criterion_9(c4: &[Certificate], c7: &[Certificate]) -> Check {
    ensure(!c4.is_empty() && !c7.is_empty(), "no certificates collected")?;
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let n4 = verify_with_cli(dir.path(), "criterion4.json", c4)?;
    let n7 = verify_with_cli(dir.path(), "criterion7.json", c7)?;
    Ok(format!("`verify` re-checked {n4} certificates from criterion 4 and {n7} from criterion 7"))
}

fn report(n: usize, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let t = Instant::now();
    let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    let took = t.elapsed();
    let (ok, detail) = match res {
        Ok(d) if took <= budget => (true, d),
        Ok(d) => (false, format!("over budget: {d}")),
        Err(e) => (false, e),
    };
    println!("criterion {n}: {} ({:.2}s, budget {}s) {detail}", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64(), budget.as_secs());
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut c4 = Vec::new();
    let mut c7 = Vec::new();
    let results = [
        report(1, secs(1), criterion_1),
        report(2, secs(1), criterion_2),
        report(3, secs(1), criterion_3),
        report(4, secs(60), || criterion_4(&mut c4)),
        report(5, secs(10), criterion_5),
        report(6, secs(30), criterion_6),
        report(7, secs(60), || criterion_7(&mut c7)),
        report(8, secs(30), criterion_8),
        report(9, secs(60), || criterion_9(&c4, &c7)),
    ];
    let passed = results.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
