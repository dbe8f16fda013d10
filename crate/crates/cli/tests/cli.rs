use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctxkit_core::ks::{peres33, verify_certificate, Certificate, OrthoGraph};
use tempfile::TempDir;

fn ctxkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Synthesizes the spin-1 model with k = z on side 1 and l = x, j = y on side 2.
fn ks_model(dir: &Path) -> PathBuf {
    let path = dir.join("ks.json");
    let o = ctxkit(&[
        "hv",
        "synth",
        "--state",
        "ks",
        "--setting",
        "k:1:squared:0,0,1",
        "--setting",
        "l:2:squared:1,0,0",
        "--setting",
        "j:2:squared:0,1,0",
        "--out",
        s(&path),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path
}

#[test]
fn verify_quantum_passes_by_default() {
    let o = ctxkit(&["verify-quantum"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("pass"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn verify_quantum_fails_below_double_precision() {
    let o = ctxkit(&["verify-quantum", "--tolerance", "1e-15"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn tolerance_outside_range_is_an_error() {
    for t in ["0", "1e-3", "-1e-9"] {
        let o = ctxkit(&["verify-quantum", "--tolerance", t]);
        assert_eq!(o.status.code(), Some(1), "{t}");
        assert!(stderr(&o).contains("tolerance"));
    }
}

#[test]
fn verify_quantum_json_lists_every_check() {
    let o = ctxkit(&["verify-quantum", "--seed", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["residual"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn peres_set_is_uncolorable_with_a_valid_certificate() {
    let dir = TempDir::new().unwrap();
    let cert = dir.path().join("cert.json");
    let o = ctxkit(&["ks-search", "--peres33", "--rule", "101", "--certificate", s(&cert)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("verdict: uncolorable"));

    let c = Certificate::from_json(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(verify_certificate(&OrthoGraph::build(peres33()).unwrap(), &c).unwrap());

    let o = ctxkit(&["ks-search", "--peres33", "--verify", s(&cert)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("certificate: valid"));
}

#[test]
fn projector_rule_and_parallel_mode_agree() {
    let seq = ctxkit(&["ks-search", "--peres33", "--rule", "projector", "--format", "json"]);
    let par = ctxkit(&["ks-search", "--peres33", "--rule", "projector", "--mode", "parallel", "--format", "json"]);
    assert_eq!(seq.status.code(), Some(3));
    assert_eq!(par.status.code(), Some(3));
    let a: serde_json::Value = serde_json::from_str(&stdout(&seq)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&par)).unwrap();
    assert_eq!(a["verdict"], b["verdict"]);
    assert_eq!(a["input_digest"], b["input_digest"]);
}

#[test]
fn tampered_certificate_rejected() {
    let dir = TempDir::new().unwrap();
    let cert = dir.path().join("cert.json");
    assert_eq!(ctxkit(&["ks-search", "--peres33", "--certificate", s(&cert)]).status.code(), Some(3));
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["nodes_explored"] = serde_json::json!(v["nodes_explored"].as_u64().unwrap() + 1);
    std::fs::write(&cert, v.to_string()).unwrap();
    let o = ctxkit(&["ks-search", "--peres33", "--verify", s(&cert)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not verify"));
}

#[test]
fn single_triad_is_colorable_with_one_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "triad.txt", "# x, y, z\n1 0 0\n0 1 0\n0 0 1\n");
    let o = ctxkit(&["ks-search", s(&f), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let values: Vec<u64> = v["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["value"].as_u64().unwrap())
        .collect();
    assert_eq!(values.len(), 3);
    assert_eq!(values.iter().filter(|&&x| x == 0).count(), 1);
}

#[test]
fn unknown_surd_reports_its_line() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.txt", "1 0 0\n0 r3 1\n");
    let o = ctxkit(&["ks-search", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2: unknown surd"), "{}", stderr(&o));
}

#[test]
fn duplicate_rays_reported_by_line() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "dup.txt", "1 0 0\n0 1 0\n\n-2 0 0\n");
    let o = ctxkit(&["ks-search", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lines 1 and 4"), "{}", stderr(&o));
}

#[test]
fn missing_input_is_an_error() {
    assert_ne!(ctxkit(&["ks-search"]).status.code(), Some(0));
    let o = ctxkit(&["ks-search", "/nonexistent/rays.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn singlet_audit_shows_pi_violation_of_one_half_per_side() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("singlet.json");
    let o = ctxkit(&[
        "hv",
        "synth",
        "--state",
        "singlet",
        "--setting",
        "a:1:pauli:0,0,1",
        "--setting",
        "b:2:pauli:0,0,1",
        "--out",
        s(&model),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = ctxkit(&["hv", "audit", s(&model), "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let check = |name: &str| {
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["check"] == name)
            .unwrap()
            .clone()
    };
    assert_eq!(check("oi")["ok"], true);
    assert_eq!(check("pi")["ok"], false);
    assert_eq!(check("decomposition")["ok"], true);
    assert!(check("pi")["detail"].as_str().unwrap().contains("side 1 0.5, side 2 0.5"));

    let o = ctxkit(&["hv", "audit", s(&model), "--check", "oi"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn local_toy_model_audits_clean() {
    let dir = TempDir::new().unwrap();
    let mut single = Vec::new();
    let mut joint = Vec::new();
    // four hidden states, each a local strategy for a, a2, b, b2
    let strategies = [[1, 1, 1, 1], [1, -1, -1, 1], [-1, 1, 1, -1], [-1, -1, 1, 1]];
    for (x, st) in strategies.iter().enumerate() {
        for (id, v) in ["a", "a2", "b", "b2"].iter().zip(st) {
            single.push(format!("\"l{x}|{id}\": {v}"));
        }
        for (i, a) in ["a", "a2"].iter().enumerate() {
            for (j, b) in ["b", "b2"].iter().enumerate() {
                joint.push(format!("\"l{x}|{a}|{b}\": [{}, {}]", st[i], st[2 + j]));
            }
        }
    }
    let body = format!(
        r#"{{"lambdas": ["l0", "l1", "l2", "l3"], "weights": ["1/4", "1/4", "1/4", "1/4"],
            "settings": [{{"id": "a", "side": 1, "outcomes": [1, -1]}}, {{"id": "a2", "side": 1, "outcomes": [1, -1]}},
                         {{"id": "b", "side": 2, "outcomes": [1, -1]}}, {{"id": "b2", "side": 2, "outcomes": [1, -1]}}],
            "single": {{{}}}, "joint": {{{}}}}}"#,
        single.join(", "),
        joint.join(", ")
    );
    let model = write(dir.path(), "toy.json", &body);
    let o = ctxkit(&["hv", "audit", s(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(!out.contains("violated"));
    assert!(out.contains("max |CHSH|"));
}

#[test]
fn invalid_model_is_an_error() {
    let dir = TempDir::new().unwrap();
    let model = write(
        dir.path(),
        "bad.json",
        r#"{"lambdas": ["p"], "weights": ["9/10"], "settings": [{"id": "a", "side": 1, "outcomes": [1, -1]}],
            "single": {"p|a": 1}, "joint": {}}"#,
    );
    let o = ctxkit(&["hv", "audit", s(&model)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("normalization"), "{}", stderr(&o));
}

#[test]
fn menu_cap_is_an_error() {
    let mut args = vec!["hv", "synth", "--state", "singlet"];
    let specs = [
        "a0:1:pauli:0,0,1",
        "a1:1:pauli:1,0,0",
        "a2:1:pauli:0,1,0",
        "b0:2:pauli:0,0,1",
        "b1:2:pauli:1,0,0",
        "b2:2:pauli:0,1,0",
    ];
    for sp in &specs {
        args.push("--setting");
        args.push(sp);
    }
    let o = ctxkit(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cap"));
}

#[test]
fn flips_on_the_spin_one_model() {
    let dir = TempDir::new().unwrap();
    let model = ks_model(dir.path());
    let o = ctxkit(&["hv", "flips", s(&model), "--setting", "k", "--outcome", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["measure"].as_f64().unwrap() > 0.0);
    assert!(!v["sigma"].as_array().unwrap().is_empty());
}

fn scenario(dir: &Path, lambda: &str, phi: &str) -> PathBuf {
    write(
        dir,
        "scenario.json",
        &format!(
            r#"{{"model": "ks.json",
                "actual": {{"lambda": "{lambda}", "measured": ["k"], "outcomes": {{"k": 0}}}},
                "phi": "{phi}", "psi": "(outcome 2 l 1)",
                "dilemma": {{"k": "k", "l": "l"}}}}"#
        ),
    )
}

/// A hidden state where k alone gives 0 but k gives 1 next to l, which gives 0.
fn sigma_member(model: &Path) -> String {
    let o = ctxkit(&["hv", "flips", s(model), "--setting", "k", "--outcome", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cell = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["partner"] == "l" && c["partner_outcome"] == 0)
        .unwrap()
        .clone();
    cell["lambdas"][0].as_str().unwrap().to_string()
}

#[test]
fn counterfactual_under_both_policies() {
    let dir = TempDir::new().unwrap();
    let model = ks_model(dir.path());
    let lambda = sigma_member(&model);
    let sc = scenario(dir.path(), &lambda, "(and (performs 1 k) (performs 2 l))");

    let o = ctxkit(&["cf-eval", s(&sc), "--policy", "fix-lambda", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["verdict"], "False");
    assert_eq!(v["dilemma"]["fix_lambda_false_equals_sigma"], true);

    let o = ctxkit(&["cf-eval", s(&sc), "--policy", "fix-outcome", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["verdict"], "True");
    assert!(!v["result"]["breaches"].as_array().unwrap().is_empty());
    assert_eq!(v["dilemma"]["breaches_equal_complement"], true);
}

#[test]
fn vacuous_antecedent() {
    let dir = TempDir::new().unwrap();
    let model = ks_model(dir.path());
    let lambda = sigma_member(&model);
    let sc = scenario(dir.path(), &lambda, "(and (performs 2 l) (performs 2 j))");
    let o = ctxkit(&["cf-eval", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: vacuous"));
}

#[test]
fn inconsistent_actual_world_is_an_error() {
    let dir = TempDir::new().unwrap();
    let model = ks_model(dir.path());
    let lambda = sigma_member(&model);
    let sc = write(
        dir.path(),
        "scenario.json",
        &format!(
            r#"{{"model": "ks.json", "actual": {{"lambda": "{lambda}", "measured": ["k"], "outcomes": {{"k": 1}}}},
                "phi": "(performs 2 l)", "psi": "(outcome 2 l 1)"}}"#
        ),
    );
    let o = ctxkit(&["cf-eval", s(&sc)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scenario claims 1"), "{}", stderr(&o));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.txt");
    let o = ctxkit(&["verify-quantum", "--rotations", "10", "--triples", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("max residual"));
}
