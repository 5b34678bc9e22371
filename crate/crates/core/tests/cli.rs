use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shadow-obstruct"));
    c.env_remove("SHADOW_OBSTRUCT_PRECISION");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const MOTZKIN: &str = "x3^6 - 3*x1^2*x2^2*x3^2 + x1^2*x2^4 + x1^4*x2^2\n";

#[test]
fn sos_check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "motzkin.poly", MOTZKIN);
    assert_eq!(code(&run(&["sos-check", s(&m), "--d", "2"])), 0);
    assert_eq!(code(&run(&["sos-check", s(&m), "--d", "1"])), 2);
    let bad = write(dir.path(), "bad.poly", "x1^2 +\n  3 * * x2\n");
    let o = run(&["sos-check", s(&bad)]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column"), "{err}");
    assert_eq!(code(&run(&["sos-check", "/nonexistent/file.poly"])), 1);
    assert_eq!(code(&run(&["sos-check", s(&m), "--d", "0"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
}

#[test]
fn certificates_reverify() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "motzkin.poly", MOTZKIN);
    let c2 = dir.path().join("c2.json");
    let c1 = dir.path().join("c1.json");
    assert_eq!(code(&run(&["sos-check", s(&m), "--d", "2", "-o", s(&c2)])), 0);
    assert_eq!(code(&run(&["sos-check", s(&m), "--d", "1", "-o", s(&c1)])), 2);
    assert_eq!(code(&run(&["verify", s(&c2)])), 0);
    assert_eq!(code(&run(&["verify", s(&c1)])), 2);

    let bundle = dir.path().join("sigma.json");
    assert_eq!(code(&run(&["sigma-d", s(&m), "--d", "2", "-o", s(&bundle)])), 0);
    let o = run(&["verify", s(&bundle), "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_valid"], true);

    let text = std::fs::read_to_string(&c2).unwrap();
    let mut j: serde_json::Value = serde_json::from_str(&text).unwrap();
    j["gram"][0][0] = serde_json::Value::String("12345".into());
    let tampered = write(dir.path(), "tampered.json", &j.to_string());
    let o = run(&["verify", s(&tampered)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("REJECTED"));
}

#[test]
fn json_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "motzkin.poly", MOTZKIN);
    let a = run(&["sigma-d", s(&m), "--d", "2", "--json"]);
    let b = run(&["sigma-d", s(&m), "--d", "2", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["branches"].as_array().unwrap().len(), 8);
    let h1 = run(&["instances", "hilbert", "--case", "quadratic", "--seed", "5"]);
    let h2 = run(&["instances", "hilbert", "--case", "quadratic", "--seed", "5"]);
    assert_eq!(h1.stdout, h2.stdout);
}

#[test]
fn copositive_reports() {
    let dir = TempDir::new().unwrap();
    let id = write(dir.path(), "id.json", r#"[["1","0","0"],["0","1","0"],["0","0","1"]]"#);
    let o = run(&["copositive", s(&id), "--dmax", "2", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["first_pass"], 1);

    let neg = write(dir.path(), "neg.json", "[[-1, 0], [0, 1]]");
    let o = run(&["copositive", s(&neg), "--dmax", "1", "--json"]);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["falsifier"]["vector"], serde_json::json!([1, 0]));

    let asym = write(dir.path(), "asym.json", "[[1, 2], [0, 1]]");
    assert_eq!(code(&run(&["copositive", s(&asym)])), 1);

    let c5 = run(&["instances", "odd-cycle", "--m", "5"]);
    let c5 = write(dir.path(), "c5.json", &stdout(&c5));
    let out = dir.path().join("c5-certs.json");
    let o = run(&["copositive", s(&c5), "--dmax", "2", "-o", s(&out)]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["verify", s(&out)])), 2);
}

#[test]
fn precision_environment_variable() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "motzkin.poly", MOTZKIN);
    let bad = bin().args(["sos-check", s(&m)]).env("SHADOW_OBSTRUCT_PRECISION", "lots").output().unwrap();
    assert_eq!(code(&bad), 1);
    let ok = bin().args(["sos-check", s(&m), "--d", "2"]).env("SHADOW_OBSTRUCT_PRECISION", "16,32").output().unwrap();
    assert_eq!(code(&ok), 0);
    let flag = bin().args(["sos-check", s(&m), "--d", "2", "--precision", "32"]).env("SHADOW_OBSTRUCT_PRECISION", "lots").output().unwrap();
    assert_eq!(code(&flag), 0);
    assert_eq!(code(&run(&["sos-check", s(&m), "--d", "2", "--basis-cap", "3"])), 1);
}

#[test]
fn demos_and_instances() {
    let o = run(&["demo", "karlin"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("39956170693955/665127936"));
    assert!(text.contains("-2277541160576348197/107750725632"));
    for name in ["horn", "motzkin", "hahn", "moment"] {
        let o = run(&["demo", name]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
    let dir = TempDir::new().unwrap();
    let h = run(&["instances", "horn", "--json"]);
    let h = write(dir.path(), "horn.json", &stdout(&h));
    assert_eq!(code(&run(&["sos-check", s(&h)])), 2);
}

#[test]
fn hahn_eval_points_and_series() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", r#"{"atoms":[["1","2"],["1","3"],["1","1/2"],["1","1/3"]],"const":"−1/11"}"#);
    let series = write(dir.path(), "a.json", r#"{"n":1,"terms":[{"exp":["0"],"coeff":"1"},{"exp":["2"],"coeff":"-1"}],"trunc":null}"#);
    let o = run(&["hahn-eval", s(&f), "--at", "0", "--at", "5", "--series", s(&series), "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["values"][0]["exact"], "43/11");
    assert_eq!(v["image"]["terms"][0]["coeff"], "43/11");
    assert_eq!(v["image"]["terms"][1]["coeff"], format!("-{}", f_at_two()));
    assert_eq!(code(&run(&["hahn-eval", s(&f), "--at", "1/0"])), 1);
}

/// `2² + 3² + (1/2)² + (1/3)² − 1/11`, the function above at 2.
fn f_at_two() -> String {
    let r = |p: i64, q: i64| num_rational::BigRational::new(p.into(), q.into());
    (r(4, 1) + r(9, 1) + r(1, 4) + r(1, 9) - r(1, 11)).to_string()
}
