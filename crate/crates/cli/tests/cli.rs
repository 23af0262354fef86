use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn relforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relforge"))
        .args(args)
        .env("RELFORGE_CORPUS", corpus())
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = relforge(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().expect("exit code"), v)
}

#[test]
fn degenerate_tm3_at_phi() {
    let (code, v) = json(&["degenerate", "--relation", "tm3.rel", "--point", "phi"]);
    assert_eq!(code, 0);
    assert_eq!(v["version"], 1);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["degenerate"], true);
    assert_eq!(v["solved"]["function"], "tm3");
    assert_eq!(v["solved"]["form"], "-z^2/(-1+z^3)");
    assert_eq!(v["solved"]["value"], "-1/4+1/4*t");
    assert_eq!(v["numeric_consistent"], true);
    let text = String::from_utf8(relforge(&["degenerate", "--relation", "tm3.rel", "--point", "phi"]).stdout).unwrap();
    assert!(text.contains("R = (z^2)/(1-z^3)"), "{text}");
}

#[test]
fn verify_bessel() {
    let (code, v) = json(&["verify", "--relation", "bessel.rel", "--terms", "200"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["first_failure"], Value::Null);
}

#[test]
fn scan_tm3() {
    let (code, v) = json(&["scan", "--relation", "tm3.rel", "--radius", "99/100"]);
    assert_eq!(code, 0);
    let factors = v["factors"].as_array().unwrap();
    assert_eq!(factors.len(), 1);
    assert_eq!(factors[0]["factor"], "-1-z+z^2");
    let roots = factors[0]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    let re = roots[0]["mid"][0].as_f64().unwrap();
    assert!((re + 0.618_033_988_75).abs() < 1e-9);
}

#[test]
fn badset_toy_ideal() {
    let (code, v) = json(&["badset", "--relation", "toy.rel", "--keep", "x1.0"]);
    assert_eq!(code, 0);
    assert_eq!(v["bad"], "-1+z");
}

#[test]
fn check_value_refutation_exits_one() {
    let (code, v) = json(&["check-value", "--function", "tm3", "--point", "half", "--value", "0"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["consistent"], false);
    let (code, v) = json(&["check-value", "--function", "tm3", "--point", "phi", "--value", "(t-1)/4", "--digits", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["consistent"], true);
}

#[test]
fn math_errors_exit_one_with_name() {
    let (code, v) = json(&["decompose", "--function", "synthetic", "--value", "sqrt2_half=1/2", "--value", "minus_sqrt2_half=-1/2"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"], "ValueNotAttained");
    let (code, v) = json(&["check-value", "--function", "tm3", "--point", "half", "--value", "z/(z-z)"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "DivisionByZeroPolynomial");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(relforge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(relforge(&["verify"]).status.code(), Some(2));
    let (code, v) = json(&["verify", "--relation", "missing"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "UnknownCorpusEntry");
    let (code, v) = json(&["check-value", "--function", "tm3", "--point", "half", "--value", "1+*2"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "SyntaxError");
}

#[test]
fn corpus_validates_quickly() {
    let start = std::time::Instant::now();
    let (code, v) = json(&["corpus", "--validate"]);
    assert_eq!(code, 0, "{v}");
    for section in ["functions", "operators", "relations", "points"] {
        let entries = v["sections"][section].as_array().unwrap();
        assert!(!entries.is_empty());
        for e in entries {
            assert_eq!(e["ok"], true, "{e}");
            assert!(e["seconds"].as_f64().unwrap() < 5.0);
        }
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn decompose_synthetic() {
    let (code, v) = json(&["decompose", "--function", "synthetic", "--value", "sqrt2_half=t/2", "--value", "minus_sqrt2_half=-t/2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["verified_to"], 256);
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
    assert_eq!(v["steps"][0]["d"], "-1/2+z^2");
}

#[test]
fn minimize_automatic_sequences() {
    let (code, v) = json(&["minimize", "--function", "rudin_shapiro", "--degree", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["operator"]["coeffs"], serde_json::json!(["1", "-1+z", "-2*z"]));
    assert_eq!(v["certificate"]["excluded_orders"], serde_json::json!([1]));
}

#[test]
fn series_and_guess() {
    let (_, v) = json(&["series", "--function", "tm3", "--terms", "9"]);
    assert_eq!(v["coefficients"], serde_json::json!(["0", "0", "1", "0", "0", "1", "1", "1", "0"]));
    let (code, v) = json(&["guess", "--functions", "J0", "--order", "2", "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["operator"]["kind"], "delta");
}

#[test]
fn eval_reports_method() {
    let (code, v) = json(&["eval", "--function", "tm3", "--point", "phi", "--digits", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["certified"], true);
    let mid = v["value"]["mid"][0].as_f64().unwrap();
    assert!((mid - 0.309_016_994_374_947_45).abs() < 1e-15);
}
