//! End-to-end tests of the `zinfer` binary: exit codes, output schema, and
//! reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use zinfer::rng::RngHandle;
use zinfer::testbeds::{analytic_posterior_samples, neal_problem};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zinfer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn zinfer")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A small but well-formed posterior-sample CSV (1D Gaussian problem).
fn write_sample_csv(path: &Path, n: usize) {
    let problem = neal_problem().unwrap();
    let samples = analytic_posterior_samples(&problem, n, &RngHandle::new(42)).unwrap();
    let mut text = String::from("x,log_likelihood,log_prior\n");
    for i in 0..samples.len() {
        text.push_str(&format!(
            "{},{},{}\n",
            samples.points().point(i)[0],
            samples.log_l()[i],
            samples.log_pi()[i]
        ));
    }
    std::fs::write(path, text).unwrap();
}

/// Pipeline settings small enough for test runtimes.
fn write_small_config(path: &Path) {
    std::fs::write(
        path,
        r#"{
  "pipeline": {
    "subset_size": 30,
    "sweeps": 150, "burn_in": 80, "thinning": 4,
    "inner_sweeps": 150, "inner_burn_in": 80, "inner_thinning": 2,
    "outer_sweeps": 300, "outer_burn_in": 150, "outer_thinning": 3,
    "posterior_draws": 500
  }
}"#,
    )
    .unwrap();
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_column_is_a_usage_error_naming_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "x,log_likelihood\n1.0,-0.5\n2.0,-1.5\n").unwrap();
    let out = run(&["infer", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("log_prior"),
        "diagnostic should name the missing column: {}",
        stderr(&out)
    );
}

#[test]
fn unknown_example_lists_valid_names() {
    let out = run(&["example", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for name in ["neal", "nix2", "bivariate", "model-pair"] {
        assert!(err.contains(name), "expected `{name}` in: {err}");
    }
}

#[test]
fn infer_writes_versioned_report_and_draws() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samples.csv");
    let config = dir.path().join("config.json");
    write_sample_csv(&input, 200);
    write_small_config(&config);

    let out_dir = dir.path().join("out");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
        "infer",
        input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let report = read_json(&out_dir.join("infer.json"));
    assert_eq!(report["schema"], 1);
    assert_eq!(report["command"], "infer");
    assert_eq!(report["seed"], 7);
    assert!(report["fingerprint"].is_string());
    assert!(report["result"]["log_evidence"]["median"].is_f64());
    assert!(report["result"]["harmonic_mean"].is_f64());
    assert_eq!(report["result"]["n_samples"], 200);

    let draws = std::fs::read_to_string(out_dir.join("log_z_draws.csv")).unwrap();
    assert!(draws.starts_with("# fingerprint="));
    assert!(draws.contains("log_z\n"));
    // 500 draws + comment lines + header
    assert_eq!(draws.lines().filter(|l| !l.starts_with('#')).count(), 501);
}

#[test]
fn same_seed_reproduces_the_report_byte_for_byte_except_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samples.csv");
    let config = dir.path().join("config.json");
    write_sample_csv(&input, 200);
    write_small_config(&config);

    let mut reports = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let out = run(&[
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            out_dir.to_str().unwrap(),
            "infer",
            input.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        let mut report = read_json(&out_dir.join("infer.json"));
        report.as_object_mut().unwrap().remove("timestamp");
        reports.push(report);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn pp_test_with_few_realizations_flags_low_power() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
  "pp": { "problem": "neal", "realizations": 4, "samples": 300 },
  "pipeline": {
    "subset_size": 30,
    "sweeps": 150, "burn_in": 80, "thinning": 4,
    "inner_sweeps": 150, "inner_burn_in": 80, "inner_thinning": 2,
    "outer_sweeps": 300, "outer_burn_in": 150, "outer_thinning": 3,
    "posterior_draws": 500
  }
}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "pp-test",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let verdict = read_json(&out_dir.join("pp_verdict.json"));
    assert_eq!(verdict["result"]["low_power"], true);
    assert_eq!(verdict["result"]["realizations"], 4);
    let quantiles = std::fs::read_to_string(out_dir.join("pp_quantiles.csv")).unwrap();
    assert!(quantiles.contains("k,quantile,band_lo,band_hi"));
}

#[test]
fn ns_oracle_recovers_the_analytic_1d_evidence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{ "ns": { "live_points": 300 } }"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
        "ns",
        "neal",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = read_json(&out_dir.join("ns.json"));
    let log_z = report["result"]["log_z"].as_f64().unwrap();
    let reference = report["result"]["analytic_reference"].as_f64().unwrap();
    assert!(
        (log_z - reference).abs() < 0.1,
        "NS {log_z} vs analytic {reference}"
    );
}

#[test]
fn tail_demo_writes_plot_ready_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
  "tail": { "samples": 1500, "grid_points": 41 },
  "pipeline": { "sweeps": 200, "burn_in": 100, "thinning": 4 }
}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "tail-demo",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("tail_demo.csv")).unwrap();
    assert!(csv.contains("x,log_truth,log_median"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 42);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{ "pipelien": { "subset_size": 10 } }"#).unwrap();
    let out = run(&["--config", config.to_str().unwrap(), "example", "neal"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pipelien"), "stderr: {}", stderr(&out));
}
