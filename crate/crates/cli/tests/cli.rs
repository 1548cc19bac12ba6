use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn skein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skein")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = skein(&full);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

fn diagram(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "diagrams", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn s1xs2_verdict_is_a_witness() {
    let (v, code) = json(&["verdict", "--manifold", "s1xs2"]);
    assert_eq!(v["verdict"], "TORSION_WITNESS");
    assert_eq!(code, 0);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["manifold", "gluing", "tor1", "cycles", "verdict", "notes"]);
}

#[test]
fn lens21_verdict_is_certified() {
    let out = skein(&["verdict", "--manifold", "lens:2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: NO_TORSION_CERTIFIED"), "{text}");

    let (v, _) = json(&["verdict", "--gluing", "1,2;1,1"]);
    assert_eq!(v["verdict"], "NO_TORSION_CERTIFIED");
    assert_eq!(v["tor1"]["dimension"], 2);
}

#[test]
fn trace_prints_canonical_order() {
    let out = skein(&["trace", "--curve", "(2,1)"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "-(y*z + x)");
    let (v, _) = json(&["trace", "--curve", "(3,-2)"]);
    assert_eq!(v["curve"], "(3,-2)");
}

#[test]
fn delta1_on_the_s1xs2_alpha_chain() {
    let (v, code) = json(&["delta1", "--manifold", "s1xs2", "--cycle", "L - LM"]);
    assert_eq!(code, 0);
    assert_eq!(v["valuation"], 1);
    assert_eq!(v["boundary"], "-(t^-3 + 1)*φ ⊗ z + (1 + t^3)*z ⊗ φ");
    let (v, _) = json(&["delta1", "--manifold", "lens:2,1", "--cycle", "y + t^3*z"]);
    assert_eq!(v["valuation"], "INFINITY");
}

#[test]
fn ideals_tor1_and_hh0() {
    let (v, _) = json(&["ideals", "--manifold", "lens:2,1"]);
    assert_eq!(v["H1"]["killed"], "(2,1)");
    let (v, _) = json(&["tor1", "--manifold", "lens:2,1", "--degree-bound", "8"]);
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["basis"], serde_json::json!(["y - z", "y^2 - y*z"]));
    let (v, _) = json(&["hh0", "--manifold", "s3"]);
    assert_eq!(v["dimension"], 1);
    let (v, _) = json(&["hh0", "--manifold", "s1xs2"]);
    assert_eq!(v["finite"], false);
    assert_eq!(v["dimension"], Value::Null);
}

#[test]
fn resolve_reads_diagram_files() {
    let (v, code) = json(&["resolve", &diagram("delta.json"), "--check"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], "t^2*z^2 + (t^-6 - t^2)");
    assert_eq!(v["state_sum_agrees"], true);
    let (v, _) = json(&["resolve", &diagram("gamma.json")]);
    assert_eq!(v["value"], "t^8*z^2 + (1 - t^8)");
}

#[test]
fn errors_carry_codes_and_exit_one() {
    let (v, code) = json(&["trace", "--curve", "L +"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["code"], "PARSE_ERROR");

    let (v, code) = json(&["tor1", "--gluing", "2,0;0,1"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["code"], "NOT_UNIMODULAR");

    let (v, code) = json(&["tor1", "--manifold", "s1xs2"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["code"], "NO_STABILIZATION");

    let out = skein(&["hh0", "--manifold", "lens:4,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[BAD_PARAMETERS]"));
}

#[test]
fn inconclusive_verdicts_exit_two() {
    let (v, code) = json(&["verdict", "--manifold", "lens:3,1"]);
    assert_eq!(v["verdict"], "INCONCLUSIVE_AT_LEVEL(2)");
    assert_eq!(code, 2);
}

#[test]
fn output_is_deterministic() {
    let a = skein(&["--format", "json", "verdict", "--manifold", "s3"]);
    let b = skein(&["--format", "json", "verdict", "--manifold", "s3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reports_match_the_published_schema() {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "schema", "torsion_report.schema.json"].iter().collect();
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for m in ["s1xs2", "lens:2,1", "s3", "lens:3,1", "identity_double"] {
        let (v, _) = json(&["verdict", "--manifold", m]);
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{m}: {errors:?}");
    }
}
