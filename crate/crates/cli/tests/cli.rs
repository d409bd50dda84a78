use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn klentropy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klentropy")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("density.json");
    let points = dir.path().join("points.csv");
    let terms = dir.path().join("terms.csv");
    fs::write(&spec, r#"{"family": "trig_product", "d": 1, "params": {"amplitude": [0.5]}}"#).unwrap();

    let out = klentropy(&["sample", "--density", s(&spec), "--n", "2000", "--seed", "4", "--out", s(&points)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&points).unwrap();
    assert!(text.starts_with("x0\n"));
    assert_eq!(text.lines().count(), 2001);

    let out = klentropy(&["estimate", "--input", s(&points), "--k", "3", "--terms-out", s(&terms)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 2000);
    assert_eq!(v["k"], 3);
    // true entropy is -0.0646
    assert!((v["entropy"].as_f64().unwrap() + 0.0646).abs() < 0.08);
    assert_eq!(fs::read_to_string(&terms).unwrap().lines().count(), 2001);
}

#[test]
fn estimate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("dup.csv");
    fs::write(&points, "x0\n0.3\n0.3\n0.7\n").unwrap();
    let out = klentropy(&["estimate", "--input", s(&points), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = klentropy(&["estimate", "--input", s(&points), "--k", "1", "--dedup-jitter", "1e-9", "--seed", "1"]);
    assert!(out.status.success());

    let out = klentropy(&["estimate", "--input", s(&points), "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));

    let out = klentropy(&["estimate", "--input", s(&dir.path().join("missing.csv"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"density": {"family": "triangle_product", "d": 2}, "k": 1,
            "n_grid": [100, 200, 400], "trials": 6, "seed": 17}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.path().join(format!("results_{workers}.csv"));
        let out = klentropy(&["experiment", "--config", s(&cfg), "--out", s(&path), "--workers", workers]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(text.starts_with("family,d,s,k,n,trials,mean_est,true_h,bias,std,rmse\n"));
    assert!(text.contains("# fitted_slope="));

    let out = klentropy(&["experiment", "--config", s(&cfg)]);
    assert_eq!(out.stdout, text.as_bytes());
}

#[test]
fn invalid_experiment_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(&cfg, r#"{"density": {"family": "uniform", "d": 1}, "k": 1, "n_grid": [50, 20], "trials": 4, "seed": 0}"#).unwrap();
    let out = klentropy(&["experiment", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ascending"));
}

#[test]
fn validate_suites() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("val.json");
    fs::write(&cfg, r#"{"density": {"family": "triangle_product", "d": 1}}"#).unwrap();
    let out = klentropy(&["validate", "--suite", "holder", "--config", s(&cfg)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("PASS\n"));

    fs::write(&cfg, r#"{"density": {"family": "uniform", "d": 1}, "n": 100, "reps": 100, "seed": 2}"#).unwrap();
    let out = klentropy(&["validate", "--suite", "beta", "--config", s(&cfg)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ks="));

    let out = klentropy(&["validate", "--suite", "nope", "--config", s(&cfg)]);
    assert!(!out.status.success());
}
