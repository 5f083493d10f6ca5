use std::process::{Command, Output};

use fibrum::formats::{Document, ElementJson, GroupRefJson, PairJson, TermJson};
use serde_json::Value;

fn fibrum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibrum")).args(args).env_remove("FIBRUM_CATALOG").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_element(dir: &tempfile::TempDir, name: &str, g: &str, h: &str, u: Vec<[usize; 2]>, phi: Vec<u32>) -> String {
    let r = |s: &str| GroupRefJson::Name(s.into());
    let e = ElementJson { g: r(g), h: r(h), n: 2, ring: "Z".into(), terms: vec![TermJson { pair: PairJson { g: r(g), h: r(h), n: 2, u, phi }, coeff: "3".into() }] };
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(&Document::new("element", &e).unwrap()).unwrap()).unwrap();
    path.to_str().unwrap().into()
}

#[test]
fn product_of_element_files() {
    let dir = tempfile::tempdir().unwrap();
    // x = 3·[C2×C1 with the faithful character], y = 3·[C1×C1].
    let x = write_element(&dir, "x.json", "C2", "C1", vec![[0, 0], [1, 0]], vec![0, 1]);
    let y = write_element(&dir, "y.json", "C1", "C1", vec![[0, 0]], vec![0]);
    let out = fibrum(&["product", "--g", "C2", "--h", "C1", "--k", "C1", "--n", "2", &x, &y]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let doc = json(&out);
    assert_eq!(doc["kind"], "element");
    assert_eq!(doc["config"]["seed"], 2024);
    let terms = doc["data"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["coeff"], "9");
    assert_eq!(terms[0]["pair"]["phi"], serde_json::json!([0, 1]));
}

#[test]
fn reduced_lists_the_center_of_q8() {
    let out = fibrum(&["reduced", "--group", "Q8", "--n", "8"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["data"]["catalog_complete"], true);
    let reduced: Vec<&Value> = doc["data"]["entries"].as_array().unwrap().iter().filter(|e| e["reduced"] == true).collect();
    assert!(reduced.iter().any(|e| e["pair"]["k"] == serde_json::json!([0, 4]) && e["pair"]["kappa"] == serde_json::json!([0, 4])));
    assert!(reduced.iter().all(|e| e["order"].as_u64().unwrap() <= 2));
}

#[test]
fn verify_suite_reports_pass() {
    let out = fibrum(&["verify", "mackey", "--max-order", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["data"]["passed"], true);
    assert_eq!(doc["data"]["criteria"][0]["slug"], "mackey");
    let out = fibrum(&["verify", "c4", "burnside-kernel", "--text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("burnside-kernel") && text.contains("c4"));
}

#[test]
fn outputs_are_deterministic() {
    let a = fibrum(&["idem", "--group", "S3", "--n", "6", "--expansions"]);
    let b = fibrum(&["idem", "--group", "S3", "--n", "6", "--expansions"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_exit_with_structured_json() {
    let out = fibrum(&["group", "Z7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["data"]["kind"], "precondition");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = fibrum(&["linearize", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["data"]["kind"], "format");
    let out = fibrum(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["data"]["kind"], "usage");
    let out = fibrum(&["squeeze", "--group", "C4", "--pair", "99"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fibrum(&["--n", "0", "group", "C2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn constructor_terms_and_text_tables() {
    let out = fibrum(&["group", "direct_product(cyclic(2),dihedral(8))", "--text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("group-report (fibrum/1)"));
    assert!(text.contains("exponent"));
    let out = fibrum(&["gamma", "--group", "Q8", "--n", "4", "--pair", "2"]);
    assert!(out.status.success());
    assert!(json(&out)["data"]["ses"]["gamma_order"].as_u64().unwrap() >= 1);
}

#[test]
fn simple_evaluation_and_linearization() {
    let out = fibrum(&["simple-eval", "--group", "C1", "--pair", "0", "--n", "3", "--p", "7", "--at", "C3", "--at", "C1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let ev = json(&out)["data"]["evaluations"].clone();
    assert_eq!(ev[0]["dim"], 3);
    assert_eq!(ev[1]["dim"], 1);
    let dir = tempfile::tempdir().unwrap();
    let x = write_element(&dir, "x.json", "C2", "C1", vec![[0, 0]], vec![0]);
    let out = fibrum(&["linearize", &x, "--p", "7"]);
    assert!(out.status.success());
    let d = json(&out)["data"].clone();
    // 3·[C2/1] has character 3·(2, 0), read in F_7.
    assert_eq!(d["values"], serde_json::json!([6, 0]));
}
