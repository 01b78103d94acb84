//! Exit codes, report shape, determinism and artifacts of the binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn s3forms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s3forms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn spectrum_degree_two() {
    let out = s3forms(&["spectrum", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["schema_version"], 1);
    assert!(r["seed"].is_u64());
    let modes: Vec<(i64, u64)> = r["result"]["modes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["lambda"].as_i64().unwrap(), m["multiplicity"].as_u64().unwrap()))
        .collect();
    assert_eq!(modes, vec![(-2, 3), (2, 3), (3, 8), (4, 15)]);
    assert_eq!(r["result"]["trusted_window"], 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(s3forms(&["bogus"]).status.code(), Some(2));
    assert_eq!(s3forms(&["spectrum", "--degree", "-1"]).status.code(), Some(2));
    assert_eq!(s3forms(&["spectrum"]).status.code(), Some(2));
    assert_eq!(s3forms(&["ale-report", "--epsilon", "0"]).status.code(), Some(2));
    assert_eq!(s3forms(&["decay", "--epsilon", "0.1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\"schema_version\": 9}").unwrap();
    let out = s3forms(&["--config", cfg.to_str().unwrap(), "spectrum", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = s3forms(&["verify", "kato", "--samples", "50"]);
    let b = s3forms(&["verify", "kato", "--samples", "50"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = s3forms(&["--seed", "7", "verify", "kato", "--samples", "50"]);
    assert_eq!(report(&c)["seed"], 7);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"schema_version":1,"degree":1,"seed":11}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let from_cfg = report(&s3forms(&["--config", c, "spectrum"]));
    assert_eq!(from_cfg["result"]["D"], 1);
    assert_eq!(from_cfg["seed"], 11);
    let flagged = report(&s3forms(&["--config", c, "spectrum", "--degree", "3"]));
    assert_eq!(flagged["result"]["D"], 3);
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

#[test]
fn ale_report_classifies_both_ends_and_writes_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ale");
    let out = s3forms(&[
        "--output",
        out_dir.to_str().unwrap(),
        "ale-report",
        "--epsilon",
        "0.1",
        "--alpha",
        "1",
        "--beta",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["decay"]["minus_end"]["classification"], "FastDecay");
    assert_eq!(r["result"]["decay"]["plus_end"]["classification"], "AsymptoticallyKahler");
    for key in ["ricci_check", "asymptotics", "energy"] {
        assert!(r["result"][key].is_object(), "{key}");
    }
    assert_eq!(
        files(&out_dir),
        vec!["ale-report.json", "ale_profile.csv", "decay_minus_end.csv", "decay_plus_end.csv"]
    );
    let csv = std::fs::read_to_string(out_dir.join("ale_profile.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("rho,omega_norm_sq,ricci_norm_sq"));
}

#[test]
fn evolve_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let init = dir.path().join("init.json");
    std::fs::write(
        &init,
        r#"{"schema_version":1,"terms":[{"monomial":[0,0,0,0],"axis":2,"coefficient":1.5}]}"#,
    )
    .unwrap();
    let out = s3forms(&["evolve", "--init", init.to_str().unwrap(), "--t0", "1", "--t1", "3", "--steps", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["component_norms_at_t0"].as_object().unwrap().len(), 1);
    assert!(r["result"]["relative_difference"]["steps"].as_f64().unwrap() < 1e-12);

    std::fs::write(
        &init,
        r#"{"schema_version":1,"terms":[{"monomial":[1,0,0,0],"axis":1,"coefficient":1.0}]}"#,
    )
    .unwrap();
    let out = s3forms(&["evolve", "--init", init.to_str().unwrap(), "--t1", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    let f = &r["failures"][0];
    for key in ["module", "operation", "input", "observed", "tolerance"] {
        assert!(f.get(key).is_some(), "{key}");
    }
}

#[test]
fn verify_targets_pass_with_defaults() {
    for target in ["frames", "hodge", "kato", "orthogonality", "elliptic"] {
        let out = s3forms(&["verify", target]);
        assert_eq!(out.status.code(), Some(0), "{target}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let kato = report(&s3forms(&["verify", "kato"]));
    for row in kato["result"]["kato"].as_array().unwrap() {
        assert_eq!(row["samples"], 500);
    }
}

#[test]
fn moser_and_decay() {
    let dir = tempfile::tempdir().unwrap();
    let out = s3forms(&["--output", dir.path().to_str().unwrap(), "moser", "--c-min", "0.01", "--c-max", "4", "--points", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("moser.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    let d = report(&s3forms(&["decay", "--epsilon", "0.1", "--alpha", "1", "--beta", "1", "--end", "plus"]));
    assert_eq!(d["result"]["classification"], "AsymptoticallyKahler");
}

#[test]
fn spectrum_operator_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = s3forms(&["--output", dir.path().to_str().unwrap(), "spectrum", "--degree", "1", "--exact", "--dump-operators"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(files(dir.path()).len(), 7);
    let star: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("star_d_D1.json")).unwrap()).unwrap();
    assert_eq!(star["operator"], "star_d");
}
