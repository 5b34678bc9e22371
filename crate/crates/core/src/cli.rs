//! Command-line front end.
//!
//! Exit codes: 0 certified, 1 usage or input error (including a rejected
//! certificate in `verify`), 2 certified non-membership, 3 inconclusive.
//! JSON output is deterministic for identical input and options.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::exact::{fmt_rat, parse_rat, psd_check, int, rat, PsdStatus, Rat, SymRatMatrix};
use crate::groupring::{parse_any, Exponent, GroupRingElement, SupportSet};
use crate::hahn::{
    apply_lf, psd_check_hahn, residue_matrix, test_k_positivity, CoefMap, HahnSeries, KPositivityConfig, LemmaStatus, SeriesJson, Template,
    TrialOutcome,
};
use crate::instances::{
    circuit_detect, even_quadratic_form, hilbert_sampler, horn, horn_matrix, motzkin, motzkin_three_squares, odd_cycle_instance,
    HilbertCase,
};
use crate::posdef::{
    approx, certify_moment_gram_pd, certify_not_kpsd, find_epsilon_kpd, gram_matrix, hankel_matrix, ExpSumFunction, FnValue,
    GridSearch, HankelVerdict, MomentFunction,
};
use crate::soscert::{
    copositivity_cert, horn_restriction_check, parse_precision, precision_from_env, sigma_d_check, sonc_reznick_pass, sos_check,
    Certificate, CertificateJson, Diagnostics, SosError, SosOptions, SosOutcome, Verdict, DEFAULT_BASIS_CAP,
};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DUAL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error(transparent)]
    Sos(#[from] SosError),
}

#[derive(Parser, Debug)]
#[command(name = "shadow-obstruct", version, about = "Exact positivity certificates for sparse polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Comma-separated rounding precisions in bits, e.g. `8,16,32,64`.
    /// Overrides SHADOW_OBSTRUCT_PRECISION.
    #[arg(long)]
    pub precision: Option<String>,
    /// Largest monomial basis handed to the SDP solver.
    #[arg(long, default_value_t = DEFAULT_BASIS_CAP)]
    pub basis_cap: usize,
    /// Print the full report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Write the emitted certificates to this file, for `verify`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test whether `p(x^d)` is a sum of squares.
    SosCheck {
        /// Polynomial file (text grammar or JSON term list); `-` reads stdin.
        path: String,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Test `p(s·x^d)` for every sign vector `s`.
    SigmaD {
        path: String,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Search for a copositivity certificate of a symmetric matrix.
    Copositive {
        /// JSON array of rows with rational entries.
        path: String,
        #[arg(long, default_value_t = 4)]
        dmax: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Reproduce a worked example and print PASS/FAIL per check.
    Demo {
        name: DemoName,
        #[arg(long)]
        json: bool,
    },
    /// Print a canonical instance.
    Instances {
        name: InstanceName,
        /// Cycle length for `odd-cycle`.
        #[arg(long, default_value_t = 5)]
        m: usize,
        /// Sampler family for `hilbert`.
        #[arg(long, default_value = "univariate")]
        case: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the even quartic of a matrix instance instead of the matrix.
        #[arg(long)]
        poly: bool,
        #[arg(long)]
        json: bool,
    },
    /// Re-check certificates exactly, without any floating point.
    Verify {
        path: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate an exponential-sum function, or apply it to a Hahn series.
    HahnEval {
        /// Function JSON `{"atoms":[["c","b"],…],"const":"…"}`.
        path: String,
        /// Rational point at which to evaluate; may be repeated.
        #[arg(long)]
        at: Vec<String>,
        /// Series JSON to which `L_f` is applied coefficientwise, with
        /// `f` evaluated at the coordinate sum of each exponent.
        #[arg(long)]
        series: Option<String>,
        #[arg(long, default_value_t = 256)]
        bits: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoName {
    Horn,
    Karlin,
    Motzkin,
    Hahn,
    Moment,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceName {
    Motzkin,
    Horn,
    HornMatrix,
    OddCycle,
    Hilbert,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CERTIFIED };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::SosCheck { path, d, solver } => cmd_sos_check(path, *d, solver, out),
        Command::SigmaD { path, d, solver } => cmd_sigma_d(path, *d, solver, out),
        Command::Copositive { path, dmax, solver } => cmd_copositive(path, *dmax, solver, out),
        Command::Demo { name, json } => cmd_demo(*name, *json, out),
        Command::Instances { name, m, case, seed, poly, json } => cmd_instances(*name, *m, case, *seed, *poly, *json, out),
        Command::Verify { path, json } => cmd_verify(path, *json, out),
        Command::HahnEval { path, at, series, bits, json } => cmd_hahn_eval(path, at, series.as_deref(), *bits, *json, out),
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
    } else {
        s = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    }
    Ok(s)
}

fn input_err(path: &str, msg: impl ToString) -> CliError {
    CliError::Input { path: path.into(), msg: msg.to_string() }
}

fn read_polynomial(path: &str) -> Result<GroupRingElement, CliError> {
    parse_any(&read_input(path)?).map_err(|e| input_err(path, e))
}

fn read_matrix(path: &str) -> Result<SymRatMatrix, CliError> {
    serde_json::from_str(&read_input(path)?).map_err(|e| input_err(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// One row per line, so matrices stay readable.
fn matrix_text(q: &SymRatMatrix) -> String {
    let rows: Vec<String> = q.rows().iter().map(|r| format!("  {}", serde_json::to_string(&r.iter().map(fmt_rat).collect::<Vec<_>>()).expect("strings serialize"))).collect();
    format!("[\n{}\n]\n", rows.join(",\n"))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn solver_options(s: &SolverArgs) -> Result<SosOptions, CliError> {
    let precision = match &s.precision {
        Some(p) => parse_precision(p)?,
        None => precision_from_env()?,
    };
    Ok(SosOptions { basis_cap: s.basis_cap, precision, basis: None })
}

fn positive_d(d: u64, flag: &str) -> Result<u64, CliError> {
    if d == 0 {
        return Err(CliError::Usage(format!("{flag} must be at least 1")));
    }
    Ok(d)
}

/// Certificates written by `--output`.
#[derive(Serialize)]
struct Bundle {
    certificates: Vec<CertificateJson>,
}

#[derive(Serialize)]
struct OutcomeJson {
    verdict: &'static str,
    certificate: Option<CertificateJson>,
    diagnostics: Option<Diagnostics>,
}

fn outcome_json(o: &SosOutcome) -> OutcomeJson {
    let (verdict, diagnostics) = match o {
        SosOutcome::Sos(_) => ("sos", None),
        SosOutcome::NotSos(_) => ("not-sos", None),
        SosOutcome::Inconclusive(d) => ("inconclusive", Some(d.clone())),
    };
    OutcomeJson { verdict, certificate: o.certificate().map(|c| c.to_json()), diagnostics }
}

fn outcome_code(o: &SosOutcome) -> i32 {
    match o {
        SosOutcome::Sos(_) => EXIT_CERTIFIED,
        SosOutcome::NotSos(_) => EXIT_DUAL,
        SosOutcome::Inconclusive(_) => EXIT_INCONCLUSIVE,
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_CERTIFIED,
        Verdict::Fail => EXIT_DUAL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn describe_outcome(o: &SosOutcome) -> String {
    match o {
        SosOutcome::Sos(c) => {
            let mut s = format!("SOS certificate: basis of {} monomials, Gram matrix exactly PSD\n", c.basis.len());
            for (w, q) in c.squares() {
                s.push_str(&format!("  + {} * ({})^2\n", fmt_rat(&w), q));
            }
            s
        }
        SosOutcome::NotSos(c) => format!(
            "dual certificate: moment matrix of size {} exactly PSD, pairing with the target = {} < 0 (normalized at {:?})\n",
            c.basis.len(),
            fmt_rat(&c.value),
            c.normalized_at
        ),
        SosOutcome::Inconclusive(d) => format!(
            "inconclusive: basis {} monomials, {} equations, {} SDP iterations, numeric min eigenvalue {:.3e}, bits tried {:?} ({})\n",
            d.basis_size, d.equations, d.sdp_iterations, d.min_eigenvalue_bound, d.tried_bits, d.note
        ),
    }
}

#[derive(Serialize)]
struct SosCheckReport {
    command: &'static str,
    input: String,
    d: u64,
    polynomial: String,
    #[serde(flatten)]
    outcome: OutcomeJson,
}

fn cmd_sos_check(path: &str, d: u64, solver: &SolverArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = positive_d(d, "--d")?;
    let p = read_polynomial(path)?;
    let opts = solver_options(solver)?;
    let q = p.psi_d(d);
    let outcome = sos_check(&q, &opts)?;
    if let Some(o) = &solver.output {
        if let Some(c) = outcome.certificate() {
            write_file(o, &to_json(&c.to_json()))?;
        }
    }
    if solver.json {
        let rep = SosCheckReport { command: "sos-check", input: p.to_string(), d, polynomial: q.to_string(), outcome: outcome_json(&outcome) };
        emit(out, &to_json(&rep))?;
    } else {
        emit(out, &format!("p(x^{d}) = {q}\n{}", describe_outcome(&outcome)))?;
    }
    Ok(outcome_code(&outcome))
}

#[derive(Serialize)]
struct BranchJson {
    signs: Vec<i8>,
    polynomial: String,
    same_as: Option<usize>,
    outcome: Option<OutcomeJson>,
}

#[derive(Serialize)]
struct SigmaJson {
    command: &'static str,
    input: String,
    d: u64,
    verdict: &'static str,
    branches: Vec<BranchJson>,
}

fn cmd_sigma_d(path: &str, d: u64, solver: &SolverArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = positive_d(d, "--d")?;
    let p = read_polynomial(path)?;
    let opts = solver_options(solver)?;
    let rep = sigma_d_check(&p, d, &opts)?;
    if let Some(o) = &solver.output {
        let certificates = rep.distinct().filter_map(|(_, o)| o.certificate()).map(|c| c.to_json()).collect();
        write_file(o, &to_json(&Bundle { certificates }))?;
    }
    if solver.json {
        let branches = rep
            .branches
            .iter()
            .zip(&rep.outcomes)
            .map(|(b, o)| BranchJson {
                signs: b.signs.clone(),
                polynomial: b.polynomial.to_string(),
                same_as: b.same_as,
                outcome: o.as_ref().map(outcome_json),
            })
            .collect();
        let j = SigmaJson { command: "sigma-d", input: p.to_string(), d, verdict: verdict_name(rep.verdict), branches };
        emit(out, &to_json(&j))?;
    } else {
        let mut s = format!("sigma-d at d = {d} for {p}\n");
        for (i, b) in rep.branches.iter().enumerate() {
            match b.same_as {
                Some(j) => s.push_str(&format!("signs {:?}: same polynomial as branch {j}\n", b.signs)),
                None => s.push_str(&format!("signs {:?}: {}", b.signs, describe_outcome(rep.outcome(i)))),
            }
        }
        s.push_str(&format!("verdict: {}\n", verdict_name(rep.verdict).to_uppercase()));
        emit(out, &s)?;
    }
    Ok(verdict_code(rep.verdict))
}

#[derive(Serialize)]
struct FalsifierJson {
    vector: Vec<u8>,
    value: String,
}

#[derive(Serialize)]
struct LevelJson {
    d: u64,
    #[serde(flatten)]
    outcome: OutcomeJson,
}

#[derive(Serialize)]
struct CopositiveJson {
    command: &'static str,
    matrix: SymRatMatrix,
    polynomial: String,
    falsifier: Option<FalsifierJson>,
    levels: Vec<LevelJson>,
    first_pass: Option<u64>,
    stopped: Option<String>,
}

fn cmd_copositive(path: &str, dmax: u64, solver: &SolverArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let dmax = positive_d(dmax, "--dmax")?;
    let q = read_matrix(path)?;
    let opts = solver_options(solver)?;
    let rep = copositivity_cert(&q, dmax, &opts)?;
    let code = if rep.first_pass.is_some() {
        EXIT_CERTIFIED
    } else if rep.falsifier.is_some() || (!rep.levels.is_empty() && rep.levels.iter().all(|(_, o)| o.is_dual())) {
        EXIT_DUAL
    } else {
        EXIT_INCONCLUSIVE
    };
    if let Some(o) = &solver.output {
        let certificates = rep.levels.iter().filter_map(|(_, o)| o.certificate()).map(|c| c.to_json()).collect();
        write_file(o, &to_json(&Bundle { certificates }))?;
    }
    let falsifier = rep.falsifier.map(|i| FalsifierJson {
        vector: (0..q.dim()).map(|j| u8::from(i == j)).collect(),
        value: fmt_rat(q.get(i, i)),
    });
    if solver.json {
        let j = CopositiveJson {
            command: "copositive",
            matrix: q.clone(),
            polynomial: rep.p.to_string(),
            falsifier,
            levels: rep.levels.iter().map(|(d, o)| LevelJson { d: *d, outcome: outcome_json(o) }).collect(),
            first_pass: rep.first_pass,
            stopped: rep.stopped.clone(),
        };
        emit(out, &to_json(&j))?;
    } else {
        let mut s = format!("p = (x^2)^T Q (x^2) = {}\n", rep.p);
        if let Some(f) = &falsifier {
            s.push_str(&format!("falsified: e^T Q e = {} < 0 at e = {:?}\n", f.value, f.vector));
        }
        for (d, o) in &rep.levels {
            s.push_str(&format!("d = {d}: {}", describe_outcome(o)));
        }
        if let Some(msg) = &rep.stopped {
            s.push_str(&format!("stopped at {msg}\n"));
        }
        match rep.first_pass {
            Some(d) => s.push_str(&format!("copositive: certified at d = {d}\n")),
            None => s.push_str("no certificate found up to the level searched\n"),
        }
        emit(out, &s)?;
    }
    Ok(code)
}

#[derive(Serialize)]
struct VerifiedJson {
    kind: &'static str,
    target: String,
    valid: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifyJson {
    command: &'static str,
    certificates: Vec<VerifiedJson>,
    all_valid: bool,
}

/// Accepts one certificate, an array of them, or an object with a
/// `certificates` array.
fn certificate_values(v: Value) -> Vec<Value> {
    match v {
        Value::Array(a) => a,
        Value::Object(mut m) if !m.contains_key("kind") && m.contains_key("certificates") => match m.remove("certificates") {
            Some(Value::Array(a)) => a,
            Some(other) => vec![other],
            None => Vec::new(),
        },
        other => vec![other],
    }
}

fn cmd_verify(path: &str, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let v: Value = serde_json::from_str(&read_input(path)?).map_err(|e| input_err(path, e))?;
    let values = certificate_values(v);
    if values.is_empty() {
        return Err(input_err(path, "no certificates found"));
    }
    let mut results = Vec::new();
    for v in values {
        let kind = match v.get("kind").and_then(Value::as_str) {
            Some("sos") => "sos",
            Some("dual") => "dual",
            _ => "unknown",
        };
        let checked = serde_json::from_value::<CertificateJson>(v)
            .map_err(|e| SosError::Json(e.to_string()))
            .and_then(|j| Certificate::from_json(&j))
            .and_then(|c| c.verify().map(|_| c));
        results.push(match checked {
            Ok(c) => VerifiedJson { kind, target: c.target().to_string(), valid: true, error: None },
            Err(e) => VerifiedJson { kind, target: String::new(), valid: false, error: Some(e.to_string()) },
        });
    }
    let all_valid = results.iter().all(|r| r.valid);
    let code = if !all_valid {
        EXIT_USAGE
    } else if results.iter().any(|r| r.kind == "dual") {
        EXIT_DUAL
    } else {
        EXIT_CERTIFIED
    };
    if json {
        emit(out, &to_json(&VerifyJson { command: "verify", certificates: results, all_valid }))?;
    } else {
        let mut s = String::new();
        for r in &results {
            match &r.error {
                None => s.push_str(&format!("VALID {} certificate for {}\n", r.kind, r.target)),
                Some(e) => s.push_str(&format!("REJECTED {} certificate: {e}\n", r.kind)),
            }
        }
        emit(out, &s)?;
    }
    Ok(code)
}

fn cmd_instances(name: InstanceName, m: usize, case: &str, seed: u64, poly: bool, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let poly_out = |p: GroupRingElement| if json { to_json(&p.to_json()) } else { format!("{p}\n") };
    let text = match name {
        InstanceName::Motzkin => poly_out(motzkin()),
        InstanceName::Horn => poly_out(horn()),
        InstanceName::HornMatrix if poly => poly_out(even_quadratic_form(&horn_matrix())),
        InstanceName::HornMatrix => matrix_text(&horn_matrix()),
        InstanceName::OddCycle => {
            let inst = odd_cycle_instance(m).map_err(|e| CliError::Usage(e.to_string()))?;
            if poly {
                poly_out(inst.p)
            } else {
                matrix_text(&inst.q)
            }
        }
        InstanceName::Hilbert => {
            let c = HilbertCase::parse(case).ok_or_else(|| {
                let names: Vec<&str> = HilbertCase::ALL.iter().map(|c| c.name()).collect();
                CliError::Usage(format!("unknown case `{case}`; expected one of {}", names.join(", ")))
            })?;
            poly_out(hilbert_sampler(c, seed))
        }
    };
    emit(out, &text)?;
    Ok(EXIT_CERTIFIED)
}

#[derive(Serialize)]
struct PointValue {
    x: String,
    exact: Option<String>,
    lo: String,
    hi: String,
    approx: f64,
}

#[derive(Serialize)]
struct HahnEvalJson {
    command: &'static str,
    function: crate::posdef::ExpSumJson,
    values: Vec<PointValue>,
    image: Option<SeriesJson>,
}

fn cmd_hahn_eval(path: &str, at: &[String], series: Option<&str>, bits: u32, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ExpSumFunction::parse_json(&read_input(path)?).map_err(|e| input_err(path, e))?;
    let mut values = Vec::new();
    for x in at {
        let xr = parse_rat(x).map_err(|e| CliError::Usage(format!("--at {x}: {e}")))?;
        let v = f.eval(&xr, bits);
        let iv = v.interval();
        values.push(PointValue {
            x: fmt_rat(&xr),
            exact: match &v {
                FnValue::Exact(r) => Some(fmt_rat(r)),
                _ => None,
            },
            lo: fmt_rat(iv.lo()),
            hi: fmt_rat(iv.hi()),
            approx: approx(&iv),
        });
    }
    let image = match series {
        Some(sp) => {
            let j: SeriesJson = serde_json::from_str(&read_input(sp)?).map_err(|e| input_err(sp, e))?;
            let a = HahnSeries::from_json(&j).map_err(|e| input_err(sp, e))?;
            let map = CoefMap::Template { template: Template::ExpSum(f.clone()), weights: vec![Rat::one(); a.dim()] };
            Some(apply_lf(&map, &a).map_err(|e| input_err(sp, e))?)
        }
        None => None,
    };
    if json {
        let j = HahnEvalJson { command: "hahn-eval", function: f.to_json(), values, image: image.map(|s| s.to_json()) };
        emit(out, &to_json(&j))?;
    } else {
        let mut s = String::new();
        for v in &values {
            match &v.exact {
                Some(e) => s.push_str(&format!("f({}) = {e}\n", v.x)),
                None => s.push_str(&format!("f({}) in [{}, {}] (~{:.12e})\n", v.x, v.lo, v.hi, v.approx)),
            }
        }
        if let Some(img) = &image {
            s.push_str(&format!("L_f(a) = {img}\n"));
        }
        emit(out, &s)?;
    }
    Ok(EXIT_CERTIFIED)
}

/// One line of a demo report.
#[derive(Clone, Debug, Serialize)]
pub struct DemoCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> DemoCheck {
    DemoCheck { name: name.into(), pass, detail: detail.into() }
}

#[derive(Serialize)]
struct DemoJson {
    command: &'static str,
    name: String,
    checks: Vec<DemoCheck>,
    all_pass: bool,
}

fn cmd_demo(name: DemoName, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let checks = run_demo(name)?;
    let all_pass = checks.iter().all(|c| c.pass);
    if json {
        let label = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        emit(out, &to_json(&DemoJson { command: "demo", name: label, checks, all_pass }))?;
    } else {
        let mut s = String::new();
        for c in &checks {
            s.push_str(&format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        emit(out, &s)?;
    }
    Ok(if all_pass { EXIT_CERTIFIED } else { EXIT_INCONCLUSIVE })
}

pub fn run_demo(name: DemoName) -> Result<Vec<DemoCheck>, CliError> {
    match name {
        DemoName::Horn => demo_horn(),
        DemoName::Karlin => demo_karlin(),
        DemoName::Motzkin => demo_motzkin(),
        DemoName::Hahn => demo_hahn(),
        DemoName::Moment => demo_moment(),
    }
}

fn verified(o: &SosOutcome) -> bool {
    o.certificate().is_some_and(|c| c.verify().is_ok())
}

fn demo_motzkin() -> Result<Vec<DemoCheck>, CliError> {
    let m = motzkin();
    let m2 = m.psi_d(2);
    let residual = motzkin_three_squares().sub(&m2).map_err(SosError::from)?;
    let mut checks = vec![check("three-square identity", residual.is_zero(), format!("residual = {}", if residual.is_zero() { "0".into() } else { residual.to_string() }))];
    let opts = SosOptions::default();
    let r1 = sigma_d_check(&m, 1, &opts)?;
    let dual_ok = r1.verdict == Verdict::Fail && r1.distinct().all(|(_, o)| !o.is_dual() || verified(o));
    checks.push(check("M not SOS at d = 1", dual_ok, "exactly verified dual certificate"));
    let r2 = sigma_d_check(&m, 2, &opts)?;
    let sos_ok = r2.verdict == Verdict::Pass && r2.distinct().all(|(_, o)| verified(o));
    checks.push(check("M(x^2) SOS at d = 2", sos_ok, "exactly verified Gram certificate for every sign pattern"));
    let c = circuit_detect(&SupportSet::of(&m).map_err(SosError::from)?);
    let third = rat(1, 3);
    let bary_ok = c.is_circuit && c.barycentric.iter().all(|b| *b == third);
    let shown: Vec<String> = c.barycentric.iter().map(fmt_rat).collect();
    checks.push(check("circuit support", bary_ok, format!("barycentric coordinates ({})", shown.join(", "))));
    let rz = sonc_reznick_pass(&m, &opts)?;
    checks.push(check("Reznick bound", rz.passes() && rz.d == 2, format!("passes at d = {}", rz.d)));
    Ok(checks)
}

fn demo_horn() -> Result<Vec<DemoCheck>, CliError> {
    let mut checks = Vec::new();
    for d in 1..=2 {
        let r = horn_restriction_check(d)?;
        let held = r.restrictions.iter().filter(|x| x.holds).count();
        checks.push(check(format!("restrictions d = {d}"), r.all_hold, format!("{held}/5 identities exact, H_{d}(e1) = {}", r.value_at_e1)));
    }
    let rep = copositivity_cert(&horn_matrix(), 2, &SosOptions::default())?;
    for (d, o) in &rep.levels {
        checks.push(check(format!("H(x^2) at d = {d}"), o.is_dual() && verified(o), "exactly verified dual certificate"));
    }
    if rep.levels.len() < 2 {
        checks.push(check("levels searched", false, "fewer than two levels completed"));
    }
    Ok(checks)
}

fn demo_karlin() -> Result<Vec<DemoCheck>, CliError> {
    let pe = |e: crate::posdef::PosdefError| CliError::Usage(e.to_string());
    let f = ExpSumFunction::f_epsilon(&[int(2), int(3)], &rat(1, 11)).map_err(pe)?;
    let mut checks = Vec::new();
    let g = gram_matrix(&f, &[int(5), int(6), int(7)], 64).map_err(pe)?;
    let m = g.exact.ok_or_else(|| CliError::Usage("Gram matrix is not exact".into()))?;
    let e11 = parse_rat("39956170693955/665127936").expect("literal");
    checks.push(check("Gram entry (1,1)", *m.get(0, 0) == e11, fmt_rat(m.get(0, 0))));
    let det = m.det();
    let det_expected = parse_rat("-2277541160576348197/107750725632").expect("literal");
    checks.push(check("Gram determinant", det == det_expected && det.is_negative(), fmt_rat(&det)));
    let w = certify_not_kpsd(&f, 2, &GridSearch { start: 5, end: 50 }).map_err(pe)?;
    let shown: Vec<String> = w.w.iter().map(fmt_rat).collect();
    checks.push(check("not 3-positive definite", w.verify(&f), format!("w = ({}), w^T G w = {}", shown.join(", "), fmt_rat(&w.value))));
    let h = ExpSumFunction::new(vec![(int(1), int(2)), (int(1), int(3))], rat(-1, 11)).map_err(pe)?;
    let s = hankel_matrix(&h, &int(0), 2, &rat(1, 1_000_000)).map_err(pe)?;
    let ok = s.verdict == HankelVerdict::PositiveDefinite && s.det().certainly_positive() && (approx(s.det()) - 0.011).abs() < 5e-4;
    checks.push(check("Hankel determinant", ok, format!("{:?}", s.det())));
    let lemma = (-10..=10).all(|a| f.eval_int(a) * f.eval_int(-a) >= Rat::one());
    checks.push(check("f(a) f(-a) >= 1 on [-10, 10]", lemma, "exact on integers"));
    let eps = find_epsilon_kpd(&[int(2), int(3)], 2).map_err(pe)?;
    checks.push(check("epsilon search", eps.eps == rat(1, 11), format!("eps = {}", fmt_rat(&eps.eps))));
    Ok(checks)
}

fn demo_hahn() -> Result<Vec<DemoCheck>, CliError> {
    let he = |e: crate::hahn::HahnError| CliError::Usage(e.to_string());
    let eps = |k: i64| HahnSeries::eps_pow(Exponent::from_ints(&[k]));
    let one = HahnSeries::one(1);
    let mut checks = Vec::new();
    let a = vec![vec![eps(1), one.clone()], vec![one.clone(), eps(-1)]];
    let v = psd_check_hahn(&a).map_err(he)?;
    checks.push(check("[[e, 1], [1, 1/e]] is PSD", v.status == PsdStatus::PositiveSemidefinite, format!("{:?}", v.status)));
    let neg = vec![vec![eps(1).neg()]];
    let v = psd_check_hahn(&neg).map_err(he)?;
    let pi = SymRatMatrix::from_rows(residue_matrix(&neg).map_err(he)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let res = psd_check(&pi).status;
    checks.push(check(
        "[[-e]] is indefinite while its residue is PSD",
        v.status == PsdStatus::Indefinite && res.is_psd(),
        format!("{:?}, residue {:?}", v.status, res),
    ));
    let pos = vec![vec![eps(1)]];
    let v = psd_check_hahn(&pos).map_err(he)?;
    let pi = SymRatMatrix::from_rows(residue_matrix(&pos).map_err(he)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let res = psd_check(&pi).status;
    checks.push(check(
        "[[e]] is PD with a singular residue",
        v.status == PsdStatus::PositiveDefinite && res == PsdStatus::PositiveSemidefinite,
        format!("{:?}, residue {:?}", v.status, res),
    ));
    let karlin = ExpSumFunction::f_epsilon(&[int(2), int(3)], &rat(1, 11)).map_err(|e| CliError::Usage(e.to_string()))?;
    let map = CoefMap::univariate(Template::ExpSum(karlin));
    let mut cfg = KPositivityConfig::new(3, 0, 0);
    cfg.lemma_points = (-10..=10).map(|a| Exponent::from_ints(&[a])).collect();
    cfg.probes = vec![[5, 6, 7].iter().map(|&k| Exponent::from_ints(&[k])).collect()];
    let rep = test_k_positivity(&map, &cfg).map_err(he)?;
    let violated = rep.probes[0].outcome == TrialOutcome::Violated;
    checks.push(check("L_f not 3-positive at exponents {5, 6, 7}", violated, rep.probes[0].witness_value.clone().unwrap_or_default()));
    let lemma = rep.lemma.iter().all(|c| c.status == LemmaStatus::Holds);
    checks.push(check("f(a) f(-a) >= 1 through L_f", lemma, format!("{} points", rep.lemma.len())));
    Ok(checks)
}

fn demo_moment() -> Result<Vec<DemoCheck>, CliError> {
    let pe = |e: crate::posdef::PosdefError| CliError::Usage(e.to_string());
    let f = MomentFunction::new(Rat::zero(), Rat::one()).map_err(pe)?;
    let mut checks = Vec::new();
    let pts = [int(0), rat(1, 2), int(1)];
    let bits = certify_moment_gram_pd(&f, &pts, 1024).map_err(pe)?;
    checks.push(check("moment Gram at (0, 1/2, 1) is PD", true, format!("certified with {bits} bits")));
    let map = CoefMap::univariate(Template::Moment(f));
    for k in 1..=3 {
        let mut cfg = KPositivityConfig::new(k, 40, 2024 + k as u64);
        cfg.lemma_points = (-4..=4).map(|a| Exponent::from_ints(&[a])).collect();
        let rep = test_k_positivity(&map, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
        checks.push(check(
            format!("L_f is {k}-positive on random trials"),
            rep.pass() && rep.inconclusive_rate() < 0.05,
            format!("{} PSD, {} violated, {} inconclusive of {}", rep.passed, rep.violated, rep.inconclusive, rep.trials),
        ));
    }
    Ok(checks)
}
