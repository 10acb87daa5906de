use std::path::Path;
use std::process::{Command, Output};

fn qplanar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplanar"))
        .args(args)
        .env_remove("QPLANAR_CACHE")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn thm1_passes_at_p2() {
    let o = qplanar(&["verify", "thm1", "--p", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "qplanar/1");
    let results = v["suites"][0]["results"].as_array().unwrap();
    assert_eq!(results.len(), 16);
    assert!(results.iter().all(|r| r["status"] == "pass" && r.get("witness").is_none()));
}

#[test]
fn thm1_relation_selection() {
    let o = qplanar(&["verify", "thm1", "--p", "2", "--relations", "1,13-14", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let ids: Vec<u64> = json(&o)["suites"][0]["results"].as_array().unwrap().iter().map(|r| r["relation"].as_u64().unwrap()).collect();
    assert_eq!(ids, vec![1, 13, 14]);
    assert_eq!(code(&qplanar(&["verify", "thm1", "--relations", "0-3"])), 2);
    assert_eq!(code(&qplanar(&["verify", "thm1", "--relations", "x"])), 2);
}

#[test]
fn projections_pass_at_p3() {
    let o = qplanar(&["verify", "projections", "--p", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn appendix_xi() {
    let o = qplanar(&["verify", "appendix", "--p", "2", "--ids", "A17", "--max-z", "10", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["suites"][0]["results"][0];
    assert_eq!(r["id"], "A17");
    assert_eq!(r["passed"], true);
    assert_eq!(code(&qplanar(&["verify", "appendix", "--ids", "A19"])), 2);
}

#[test]
fn morphism_suite_reports_the_sign() {
    let o = qplanar(&["verify", "morphisms", "--p", "2", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let checks = json(&o)["suites"][0]["results"][0]["checks"].as_array().unwrap().clone();
    for c in checks {
        let quoted = c["name"].as_str().unwrap().contains("equals the quoted");
        assert_eq!(c["passed"], !quoted, "{c}");
    }
}

#[test]
fn generic_jw() {
    let o = qplanar(&["compute", "jw", "--n", "3", "--mode", "generic", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["mode"], "generic");
    assert_eq!(v["operator"]["m"], 3);
    assert!(v.get("p").is_none());
}

#[test]
fn pole_exit_code() {
    let o = qplanar(&["compute", "jw", "--n", "2", "--mode", "root", "--p", "2"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("vanishes"));
    assert_eq!(code(&qplanar(&["compute", "expr", "scalar[1/[3]] id(1)", "--p", "3"])), 3);
}

#[test]
fn projection_bundle() {
    let o = qplanar(&["compute", "projection", "--p", "3", "--i", "1", "--sign", "+", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["rank"], 6);
    assert_eq!(v["method"], "descent");
    assert_eq!(v["spectrum"].as_array().unwrap().len(), 6);
    let o = qplanar(&["compute", "projection", "--p", "2", "--i", "1", "--sign", "-", "--format", "json"]);
    assert_eq!(json(&o)["rank"], 8);
}

#[test]
fn morphism_variants_need_labels() {
    assert_eq!(code(&qplanar(&["compute", "morphism", "--name", "theta-var", "--p", "3", "--i", "1"])), 2);
    let o = qplanar(&["compute", "morphism", "--name", "theta-var", "--p", "3", "--i", "1", "--j", "2", "--pos", "u"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("theta_2u(i=1)"));
    assert_eq!(code(&qplanar(&["compute", "morphism", "--name", "phi", "--p", "3", "--i", "3"])), 2);
}

#[test]
fn configuration_errors() {
    assert_eq!(code(&qplanar(&["--p", "1", "decompose", "--n", "2"])), 2);
    assert_eq!(code(&qplanar(&["compute", "alpha", "--mode", "generic"])), 2);
    assert_eq!(code(&qplanar(&["compute", "expr", "cup(1,2) * cup(1,2)"])), 2);
    assert_eq!(code(&qplanar(&["decompose", "--n", "40"])), 2);
    assert_eq!(code(&qplanar(&["verify", "bogus"])), 2);
}

#[test]
fn decompositions() {
    let o = qplanar(&["decompose", "--p", "3", "--n", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["summands"], serde_json::json!([{"module": "X+_1", "multiplicity": 1}, {"module": "X+_3", "multiplicity": 1}]));
    let v = json(&qplanar(&["decompose", "--p", "2", "--n", "2", "--format", "json"]));
    assert_eq!(v["summands"], serde_json::json!([{"module": "P+_1", "multiplicity": 1}]));
    let v = json(&qplanar(&["decompose", "--p", "3", "--n", "5", "--format", "json"]));
    assert!(v["summands"].as_array().unwrap().iter().any(|s| s["module"] == "X-_3"));
    assert_eq!(v["matches_fusion"], true);
}

#[test]
fn output_is_deterministic_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let o = qplanar(&["compute", "projection", "--p", "3", "--i", "2", "--sign", "-", "--format", "json", "--threads", threads, "--out", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let failed = dir.path().join("c.json");
    let o = qplanar(&["compute", "jw", "--n", "2", "--p", "2", "--out", failed.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!failed.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

fn cached_files(dir: &Path) -> Vec<std::path::PathBuf> {
    std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect()
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let first = qplanar(&["compute", "jw", "--n", "2", "--p", "3", "--format", "json", "--cache", cache]);
    assert_eq!(code(&first), 0);
    let files = cached_files(dir.path());
    assert_eq!(files.len(), 1);
    // a tampered entry is only returned when the cache is trusted
    let mut doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&files[0]).unwrap()).unwrap();
    doc["object"] = "tampered".into();
    std::fs::write(&files[0], serde_json::to_string(&doc).unwrap()).unwrap();
    let trusted = qplanar(&["compute", "jw", "--n", "2", "--p", "3", "--format", "json", "--cache", cache, "--trust-cache"]);
    assert_eq!(json(&trusted)["object"], "tampered");
    let checked = qplanar(&["compute", "jw", "--n", "2", "--p", "3", "--format", "json", "--cache", cache]);
    assert_eq!(checked.stdout, first.stdout);
    assert!(String::from_utf8_lossy(&checked.stderr).contains("stale"));
    let env = Command::new(env!("CARGO_BIN_EXE_qplanar"))
        .args(["compute", "jw", "--n", "2", "--p", "3", "--format", "json", "--trust-cache"])
        .env("QPLANAR_CACHE", cache)
        .output()
        .unwrap();
    assert_eq!(env.stdout, first.stdout);
}
