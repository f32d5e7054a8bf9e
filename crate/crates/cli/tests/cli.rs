use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn advbayes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advbayes")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const GAUSS: &str = r#"{
  "class0": [{"type": "gaussian", "weight": 0.5, "mu": 0.0, "sigma": 1.0}],
  "class1": [{"type": "gaussian", "weight": 0.5, "mu": 2.0, "sigma": 1.0}]
}"#;

#[test]
fn solve_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.json");
    let out = dir.path().join("report.json");
    let csv = dir.path().join("summary.csv");
    fs::write(&cfg, GAUSS).unwrap();
    let o = advbayes(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--eps",
        "0.5",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert_eq!(v["unique_up_to_degeneracy"], Value::Bool(true));
    let rep = &v["classes"][0]["representative"][0];
    assert!((rep[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(rep[1], Value::String("inf".into()));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("epsilon,min_risk,n_classes,unique,comp_a,comp_ac,monotone,representatives\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn output_is_byte_identical() {
    let a = advbayes(&["solve", "--example", "non_uniqueness_all", "--eps", "0.2"]);
    let b = advbayes(&["solve", "--example", "non_uniqueness_all", "--eps", "0.2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn negative_eps_is_usage_error() {
    let o = advbayes(&["solve", "--example", "degenerate", "--eps", "-1"]);
    assert_eq!(code(&o), 1);
    let o = advbayes(&["solve", "--example", "degenerate"]);
    assert_eq!(code(&o), 1);
    let o = advbayes(&["solve", "--bogus"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn degenerate_interval_flagged() {
    let o = advbayes(&["solve", "--example", "degenerate", "--eps", "0.2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let class = &v["classes"][0];
    assert!(!class["degenerate_intervals"].as_array().unwrap().is_empty());
    assert_eq!(class["degenerate"]["assumptions_met"], Value::Bool(false));
}

#[test]
fn warnings_exit_two() {
    // the support has three components, so the solver warns about the window
    let o = advbayes(&["solve", "--example", "deg_eta_0_1_counterexample", "--eps", "0.1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn sweep_uniqueness_flips_at_one() {
    let o = advbayes(&[
        "sweep",
        "--example",
        "gaussians_equal_variances",
        "--eps-min",
        "0.1",
        "--eps-max",
        "1.5",
        "--steps",
        "15",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 15);
    let mut last_risk = f64::NEG_INFINITY;
    for r in &rows {
        let eps: f64 = r[0].parse().unwrap();
        let risk: f64 = r[1].parse().unwrap();
        assert!(risk >= last_risk - 1e-12);
        last_risk = risk;
        let unique = &r[3] == "true";
        assert_eq!(unique, eps < 1.0 - 1e-9, "eps={eps}");
        if eps > 0.15 {
            assert_eq!(&r[6], "holds");
        }
    }
}

#[test]
fn sweep_non_uniqueness_all() {
    let o = advbayes(&[
        "sweep",
        "--example",
        "non_uniqueness_all",
        "--eps-min",
        "0.05",
        "--eps-max",
        "0.3",
        "--steps",
        "6",
    ]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    for r in rdr.records() {
        assert_eq!(&r.unwrap()[3], "false");
    }
}

#[test]
fn single_step_sweep_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let s = advbayes(&["solve", "--example", "degenerate", "--eps", "0.1", "--csv", a.to_str().unwrap()]);
    assert_eq!(code(&s), 0);
    let w = advbayes(&[
        "sweep",
        "--example",
        "degenerate",
        "--eps-min",
        "0.1",
        "--eps-max",
        "0.1",
        "--steps",
        "1",
        "--csv",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&w), 0);
    assert_eq!(fs::read_to_string(a).unwrap(), fs::read_to_string(b).unwrap());
}

#[test]
fn certify_non_uniqueness_all() {
    let o = advbayes(&["certify", "--example", "non_uniqueness_all", "--eps", "0.2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["gap"].as_f64().unwrap().abs() <= 1e-2);
    assert_eq!(v["matching"], Value::Null);
    assert!(v["matching_summary"]["pairs"].as_u64().unwrap() > 0);
}

#[test]
fn certify_full_matching_and_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("atoms.json");
    fs::write(&cfg, r#"{"atoms": {"class0": [[-0.3, 0.5]], "class1": [[0.3, 0.5]]}, "run": {"epsilon": 0.3}}"#)
        .unwrap();
    let o = advbayes(&["certify", "--config", cfg.to_str().unwrap(), "--full-matching"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dual_value"].as_f64(), Some(0.5));
    assert_eq!(v["matching"].as_array().unwrap().len(), 1);
}

#[test]
fn certify_bad_max_k_and_budget() {
    let o = advbayes(&["certify", "--example", "degenerate", "--eps", "0.1", "--max-k", "0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("maxK"));
    let o = advbayes(&["certify", "--example", "degenerate", "--eps", "0.1", "--max-k", "3", "--grid-h", "1e-9"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn examples_command() {
    let o = advbayes(&["examples", "gaussians_equal_means"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.contains("b root"));
    let o = advbayes(&["examples", "degenerate"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("crossover radius"));
    let o = advbayes(&["examples", "no_such_example"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn thread_cap_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_advbayes"))
        .args(["solve", "--example", "non_uniqueness_single", "--eps", "0.1"])
        .env("ADVBAYES_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_advbayes"))
        .args(["solve", "--example", "non_uniqueness_single", "--eps", "0.1"])
        .env("ADVBAYES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}
