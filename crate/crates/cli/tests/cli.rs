use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vrm"))
        .args(args)
        .env_remove("VRM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn regret_sim_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = vrm(&[
            "regret-sim", "--adversary", "constant", "--T", "1000", "--seed", "7",
            "--out", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["ledger.csv", "result_7.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let s = summary(&a);
    assert_eq!(s["config"]["adversary"], "constant");
    assert_eq!(s["config"]["seeds"], serde_json::json!([7]));
}

#[test]
fn regret_sim_slope_is_sublinear() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vrm(&[
        "regret-sim", "--learner", "vrm", "--T", "5000,20000,80000", "--seeds", "0..3",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let slope = summary(tmp.path())["slope"].as_f64().unwrap();
    assert!(slope < 1.0, "{slope}");
}

#[test]
fn usage_errors_exit_2_and_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let d = dir.to_str().unwrap();
    for args in [
        vec!["regret-sim", "--adversary", "constant", "--out", d],
        vec!["regret-sim", "--adversary", "sideways", "--T", "100", "--out", d],
        vec!["svm-blobs", "--seeds", "3..1", "--out", d],
        vec!["linreg-dpp", "--trunc", "1", "--out", d],
        vec!["svm-blobs", "--data", "x.csv", "--out", d],
        vec!["bogus-command"],
    ] {
        let out = vrm(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!dir.exists(), "{args:?} wrote output");
    }
}

#[test]
fn svm_blobs_over_seed_range() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vrm(&[
        "svm-blobs", "--seeds", "1..5", "--n", "600", "--epochs", "1", "--eval-every", "200",
        "--jobs", "2", "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for seed in 1..=5 {
        let csv = fs::read_to_string(tmp.path().join(format!("result_{seed}.csv"))).unwrap();
        assert!(csv.starts_with("iter,metric,sampler,seed\n"));
    }
    let s = summary(tmp.path());
    let runs = s["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 5);
    assert!(runs.iter().all(|r| r["final_weights"].as_array().unwrap().len() == 7));
    let cps = s["checkpoints"].as_array().unwrap();
    assert!(!cps.is_empty());
    assert!(cps.iter().all(|c| c["count"] == 5 && c["ci95"].as_f64().unwrap() >= 0.0));
    assert_eq!(s["config"]["n"], 600);
}

#[test]
fn kmeans_samplers_share_a_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let mut headers = Vec::new();
    for sampler in ["uniform", "vrm"] {
        let dir = tmp.path().join(sampler);
        let out = vrm(&[
            "kmeans", "--sampler", sampler, "--n", "2000", "--clusters", "10", "--blobs", "10",
            "--iterations", "20", "--tune", "false", "--out", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(dir.join("result_0.csv")).unwrap();
        headers.push(csv.lines().next().unwrap().to_string());
        assert!(csv.contains(&format!(",{sampler},0")));
    }
    assert_eq!(headers[0], headers[1]);
}

#[test]
fn unbiased_truncation_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vrm(&[
        "linreg-dpp", "--trunc", "1.0,0.0", "--n", "100", "--epochs", "2",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path());
    assert_eq!(s["unbiased"], true);
    assert_eq!(s["config"]["trunc"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.ini");
    fs::write(&cfg, "# small run\n[svm]\nn = 300\nepochs = 1\neval_every = 100\nseeds = 4\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = vrm(&[
        "svm-blobs", "--config", cfg.to_str().unwrap(), "--n", "400",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out_dir);
    assert_eq!(s["config"]["n"], 400);
    assert_eq!(s["config"]["epochs"], 1);
    assert_eq!(s["seeds"], serde_json::json!([4]));
    assert!(out_dir.join("result_4.csv").exists());
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("env-out");
    let out = Command::new(env!("CARGO_BIN_EXE_vrm"))
        .args(["project-test", "--k", "3", "--cases", "50"])
        .env("VRM_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(summary(&dir)["passed"], true);
}

#[test]
fn failing_seeds_are_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("points.csv");
    // Too few points for the requested number of centers.
    fs::write(&data, "x,y\n0,0\n1,1\n2,2\n3,3\n4,4\n").unwrap();
    let dir = tmp.path().join("out");
    let out = vrm(&[
        "kmeans", "--data", data.to_str().unwrap(), "--seeds", "1,2", "--tune", "false",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let s = summary(&dir);
    assert_eq!(s["failures"].as_array().unwrap().len(), 2);
    assert!(s["runs"].as_array().unwrap().is_empty());
}

#[test]
fn projection_of_a_given_vector() {
    let tmp = tempfile::tempdir().unwrap();
    let out = vrm(&[
        "project-test", "--w", "0.9,-0.2,0.5", "--gamma", "0.2", "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let x: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((x[0] - 0.7).abs() < 1e-12 && x[1] == 0.0 && (x[2] - 0.3).abs() < 1e-12, "{x:?}");
}
