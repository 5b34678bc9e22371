//! Empirical testing of `k`-positivity of `L_f`: random positive
//! semidefinite matrices over the series field, explicit rank-one probes
//! `a·aᵀ` with `a = (ε^{x_1}, …, ε^{x_k})`, and the necessary condition
//! `f(a)·f(−a) ≥ 1` that comes from the matrix `[[ε^a, 1], [1, ε^{−a}]]`.
//!
//! Passing is evidence, not proof: only finitely many matrices are tried.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::coefmap::CoefMap;
use super::matrix::{gram_of, psd_check_hahn, HahnMatrix};
use super::series::HahnSeries;
use super::HahnError;
use crate::exact::rat::{fmt_rat, Rat};
use crate::exact::PsdStatus;
use crate::groupring::Exponent;

#[derive(Clone, Debug)]
pub struct KPositivityConfig {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Exponent tuples `x` tested through `L_f(a·aᵀ)` with `a_i = ε^{x_i}`.
    pub probes: Vec<Vec<Exponent>>,
    /// Points `a` at which `f(a)·f(−a) ≥ 1` is checked.
    pub lemma_points: Vec<Exponent>,
    /// Fraction of random trials whose entries carry a finite cutoff.
    pub truncated_fraction: f64,
}

impl KPositivityConfig {
    pub fn new(k: usize, trials: usize, seed: u64) -> Self {
        KPositivityConfig { k, trials, seed, probes: Vec::new(), lemma_points: Vec::new(), truncated_fraction: 0.02 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrialOutcome {
    Psd,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    pub exponents: Vec<String>,
    pub outcome: TrialOutcome,
    /// `wᵀ L_f(aaᵀ) w` for a violating probe.
    pub witness_value: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaStatus {
    Holds,
    Fails,
    Uncertain,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub a: String,
    pub product: String,
    pub radius: String,
    pub status: LemmaStatus,
}

/// A random trial where `L_f(B)` was certified indefinite.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub b: HahnMatrix,
    pub lf_b: HahnMatrix,
    pub witness: Vec<HahnSeries>,
}

#[derive(Clone, Debug)]
pub struct KPositivityReport {
    pub k: usize,
    pub trials: usize,
    pub passed: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub probes: Vec<ProbeResult>,
    pub lemma: Vec<LemmaCheck>,
    pub counterexample: Option<Counterexample>,
    /// Largest enclosure radius among the coefficient values used.
    pub max_radius: Rat,
}

impl KPositivityReport {
    pub fn kpositive_pass(&self) -> bool {
        self.violated == 0 && self.probes.iter().all(|p| p.outcome != TrialOutcome::Violated)
    }

    pub fn lemma_pass(&self) -> bool {
        self.lemma.iter().all(|c| c.status == LemmaStatus::Holds)
    }

    pub fn pass(&self) -> bool {
        self.kpositive_pass() && self.lemma_pass()
    }

    pub fn inconclusive_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.trials as f64
        }
    }
}

/// Memoised evaluation of `f`, tracking the largest radius seen.
struct Evaluator<'a> {
    f: &'a CoefMap,
    cache: HashMap<Exponent, Rat>,
    max_radius: Rat,
}

impl<'a> Evaluator<'a> {
    fn value(&mut self, e: &Exponent) -> Result<Rat, HahnError> {
        if let Some(v) = self.cache.get(e) {
            return Ok(v.clone());
        }
        let v = self.f.eval(e)?;
        if v.radius > self.max_radius {
            self.max_radius = v.radius.clone();
        }
        self.cache.insert(e.clone(), v.value.clone());
        Ok(v.value)
    }

    fn apply(&mut self, a: &HahnSeries) -> Result<HahnSeries, HahnError> {
        super::coefmap::apply_lf_with(a, |e| self.value(e))
    }

    fn apply_matrix(&mut self, m: &HahnMatrix) -> Result<HahnMatrix, HahnError> {
        m.iter().map(|row| row.iter().map(|x| self.apply(x)).collect()).collect()
    }
}

fn classify(m: &HahnMatrix) -> Result<(TrialOutcome, Option<Vec<HahnSeries>>, Option<HahnSeries>), HahnError> {
    match psd_check_hahn(m) {
        Ok(v) if v.status == PsdStatus::Indefinite => Ok((TrialOutcome::Violated, v.witness, v.witness_value)),
        Ok(_) => Ok((TrialOutcome::Psd, None, None)),
        Err(HahnError::IndeterminateAtTruncation(_)) => Ok((TrialOutcome::Inconclusive, None, None)),
        Err(e) => Err(e),
    }
}

fn random_exponent(rng: &mut ChaCha8Rng, n: usize) -> Exponent {
    // Half-integers in [-2, 3] keep sums varied without blowing up sizes.
    Exponent((0..n).map(|_| Rat::new(rng.gen_range(-4i64..=6).into(), 2.into())).collect())
}

fn random_series(rng: &mut ChaCha8Rng, n: usize, truncated: bool) -> Result<HahnSeries, HahnError> {
    let count = rng.gen_range(1..=3);
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let mut c: i64 = rng.gen_range(-3..=3);
        if c == 0 {
            c = 1;
        }
        terms.push((random_exponent(rng, n), Rat::from_integer(c.into())));
    }
    let trunc = truncated.then(|| {
        let mut t = Exponent::zero(n);
        t.0[0] = Rat::from_integer(4.into());
        t
    });
    HahnSeries::from_terms(n, terms, trunc)
}

/// Runs the random trials, probes and the `f(a)f(−a) ≥ 1` checks.
pub fn test_k_positivity(f: &CoefMap, cfg: &KPositivityConfig) -> Result<KPositivityReport, HahnError> {
    assert!(cfg.k >= 1, "k must be positive");
    let n = f.dim();
    let k = cfg.k;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ev = Evaluator { f, cache: HashMap::new(), max_radius: Rat::zero() };
    let mut report = KPositivityReport {
        k,
        trials: cfg.trials,
        passed: 0,
        violated: 0,
        inconclusive: 0,
        probes: Vec::new(),
        lemma: Vec::new(),
        counterexample: None,
        max_radius: Rat::zero(),
    };

    for _ in 0..cfg.trials {
        let truncated = rng.gen_bool(cfg.truncated_fraction.clamp(0.0, 1.0));
        let r = rng.gen_range(1..=k + 1);
        let mut vectors = Vec::with_capacity(r);
        for _ in 0..r {
            let v: Vec<HahnSeries> = (0..k)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        Ok(HahnSeries::zero(n))
                    } else {
                        random_series(&mut rng, n, truncated)
                    }
                })
                .collect::<Result<_, _>>()?;
            vectors.push(v);
        }
        let b = gram_of(&vectors)?;
        let lf_b = ev.apply_matrix(&b)?;
        let (outcome, witness, _) = classify(&lf_b)?;
        match outcome {
            TrialOutcome::Psd => report.passed += 1,
            TrialOutcome::Inconclusive => report.inconclusive += 1,
            TrialOutcome::Violated => {
                report.violated += 1;
                if report.counterexample.is_none() {
                    report.counterexample = Some(Counterexample { b, lf_b, witness: witness.unwrap_or_default() });
                }
            }
        }
    }

    for probe in &cfg.probes {
        let a: Vec<HahnSeries> = probe.iter().map(|e| HahnSeries::eps_pow(e.clone())).collect();
        let b = gram_of(&[a])?;
        let lf_b = ev.apply_matrix(&b)?;
        let (outcome, _, value) = classify(&lf_b)?;
        report.probes.push(ProbeResult {
            exponents: probe.iter().map(|e| e.to_string()).collect(),
            outcome,
            witness_value: value.map(|v| v.to_string()),
        });
    }

    for a in &cfg.lemma_points {
        let p = f.eval(a)?;
        let m = f.eval(&-a)?;
        let prod = p.interval().mul(&m.interval());
        let one = Rat::one();
        let status = if prod.lo() >= &one {
            LemmaStatus::Holds
        } else if prod.hi() < &one {
            LemmaStatus::Fails
        } else {
            LemmaStatus::Uncertain
        };
        report.lemma.push(LemmaCheck {
            a: a.to_string(),
            product: fmt_rat(&(&p.value * &m.value)),
            radius: fmt_rat(&prod.radius()),
            status,
        });
    }
    report.max_radius = ev.max_radius;
    Ok(report)
}
