//! Config loading, figure runs, and oracle validation exercised through the
//! library API, plus a few end-to-end checks against the compiled binary.

use std::path::PathBuf;
use std::process::Command;

use dronecell_cli::config::{load_config, ExperimentKind, Overrides, SweepAxis};
use dronecell_cli::experiments::run_experiment;
use dronecell_cli::validate::validate_against_oracle;
use tempfile::tempdir;

fn overrides(kind: ExperimentKind) -> Overrides {
    Overrides {
        kind: Some(kind),
        ..Overrides::default()
    }
}

fn write_config(dir: &tempfile::TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

#[test]
fn fig2_defaults_match_stated_parameters() {
    let spec = load_config(None, &overrides(ExperimentKind::Fig2)).unwrap();
    assert_eq!(spec.fixed.p_interferer_dbw, -10.0);
    assert_eq!(spec.fixed.lambda_per_m2, 1e-5);
    assert_eq!(spec.fixed.h_m, 500.0);
    assert_eq!(spec.fixed.environment.frequency_hz, 2.0e9);
    assert_eq!(spec.sweep.axis, SweepAxis::BeamwidthDeg);
    assert_eq!(spec.sweep.values.first(), Some(&30.0));
    assert_eq!(spec.sweep.values.last(), Some(&150.0));
    assert_eq!(spec.trials, 100_000);
    // dB -> watts happens at the config boundary
    let net = spec.fixed.network().unwrap();
    assert_eq!(net.p_interferer, 0.1);
}

#[test]
fn fig5_defaults_match_stated_parameters() {
    let spec = load_config(None, &overrides(ExperimentKind::Fig5)).unwrap();
    assert_eq!(spec.fixed.p_ue_dbw, 0.0);
    assert_eq!(spec.fixed.threshold_db, -2.0);
    assert_eq!(spec.fixed.beamwidth_deg, 120.0);
    assert_eq!(spec.fixed.r_m, 200.0);
    assert_eq!(spec.sweep.axis, SweepAxis::HM);
    let net = spec.fixed.network().unwrap();
    assert_eq!(net.p_ue, 1.0);
}

#[test]
fn config_rejects_beamwidth_past_cap() {
    let dir = tempdir().unwrap();
    let path = write_config(
        &dir,
        "wide.json",
        r#"{ "kind": "fig2", "fixed": { "beamwidth_deg": 170.0 } }"#,
    );
    let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("beamwidth_deg"), "{msg}");
    assert!(msg.contains("(0, 150]"), "diagnostic should state the legal range: {msg}");
}

#[test]
fn config_rejects_unknown_key() {
    let dir = tempdir().unwrap();
    let path = write_config(&dir, "bad.json", r#"{ "kind": "fig2", "bogus_key": 1 }"#);
    let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
    assert!(format!("{err:#}").contains("bogus_key"), "{err:#}");
}

#[test]
fn config_rejects_wrong_axis_for_figure() {
    let dir = tempdir().unwrap();
    let path = write_config(
        &dir,
        "axis.json",
        r#"{ "kind": "fig2", "sweep": { "axis": "h_m", "values": [100.0] } }"#,
    );
    let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
    assert!(format!("{err:#}").contains("beamwidth_deg"), "{err:#}");
}

#[test]
fn custom_sweep_requires_sweep_block() {
    let err = load_config(None, &overrides(ExperimentKind::CustomSweep)).unwrap_err();
    assert!(format!("{err:#}").contains("sweep"), "{err:#}");
}

#[test]
fn environment_table_loads_from_file() {
    let dir = tempdir().unwrap();
    let env_path = write_config(
        &dir,
        "env.json",
        r#"{
            "name": "custom-env", "mu_los_db": 2.0, "mu_nlos_db": 30.0,
            "a_los_db": 1.0, "a_nlos_db": 4.0,
            "b_los_per_rad": 0.2, "b_nlos_per_rad": 0.5,
            "beta1": 0.5, "beta2": 0.2, "frequency_hz": 2.4e9
        }"#,
    );
    let cfg_path = write_config(
        &dir,
        "cfg.json",
        &format!(
            r#"{{ "kind": "fig2", "fixed": {{ "environment_path": {:?} }} }}"#,
            env_path.to_str().unwrap()
        ),
    );
    let spec = load_config(Some(&cfg_path), &Overrides::default()).unwrap();
    assert_eq!(spec.fixed.environment.name, "custom-env");
    assert_eq!(spec.fixed.environment.frequency_hz, 2.4e9);
}

#[test]
fn inline_and_file_environment_conflict() {
    let dir = tempdir().unwrap();
    let path = write_config(
        &dir,
        "conflict.json",
        r#"{ "kind": "fig2", "fixed": {
            "environment_path": "x.json",
            "environment": {
                "name": "inline", "mu_los_db": 1.0, "mu_nlos_db": 20.0,
                "a_los_db": 1.0, "a_nlos_db": 3.0,
                "b_los_per_rad": 0.3, "b_nlos_per_rad": 0.4,
                "beta1": 0.6, "beta2": 0.11, "frequency_hz": 2.0e9
            }
        } }"#,
    );
    let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
    assert!(format!("{err:#}").contains("mutually exclusive"), "{err:#}");
}

#[test]
fn fig2_mean_column_is_monotone_and_rerun_is_byte_identical() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let spec = load_config(
        None,
        &Overrides {
            kind: Some(ExperimentKind::Fig2),
            out: Some(out.clone()),
            seed: Some(7),
            ..Overrides::default()
        },
    )
    .unwrap();

    let outcome = run_experiment(&spec).unwrap();
    assert_eq!(outcome.failures, 0);
    let first = std::fs::read(&out).unwrap();

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let mut prev = f64::NEG_INFINITY;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        let mean: f64 = record[2].parse().unwrap();
        assert!(mean >= prev, "mean interference decreased at row {rows}");
        prev = mean;
        rows += 1;
    }
    assert_eq!(rows, 13);

    run_experiment(&spec).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), first, "rerun changed the CSV bytes");
}

#[test]
fn fig4_cv_product_is_constant() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let cfg = write_config(
        &dir,
        "fig4.json",
        r#"{ "kind": "fig4", "sweep": { "axis": "lambda_per_m2", "values": [1e-5, 1e-4] },
             "trials": 30000, "seed": 5 }"#,
    );
    let spec = load_config(
        Some(&cfg),
        &Overrides {
            out: Some(out.clone()),
            ..Overrides::default()
        },
    )
    .unwrap();
    run_experiment(&spec).unwrap();

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let mut products = Vec::new();
    for record in reader.records() {
        let record = record.unwrap();
        let lambda: f64 = record[0].parse().unwrap();
        let h: f64 = record[1].parse().unwrap();
        let cv: f64 = record[2].parse().unwrap();
        products.push(cv * h * lambda.sqrt());
    }
    assert_eq!(products.len(), 4, "two densities at two altitudes");
    let reference = products[0];
    for p in &products {
        assert!(
            (p - reference).abs() <= 0.10 * reference,
            "cv·h·sqrt(lambda) not constant within 10%: {products:?}"
        );
    }
}

#[test]
fn failing_sweep_point_emits_error_marker() {
    // h = 10 m at r = 200 m puts the UE far outside the channel model
    let dir = tempdir().unwrap();
    let out = dir.path().join("fig5.csv");
    let cfg = write_config(
        &dir,
        "fig5.json",
        r#"{ "kind": "fig5", "sweep": { "axis": "h_m", "values": [10.0, 500.0] },
             "trials": 2000, "seed": 5 }"#,
    );
    let spec = load_config(
        Some(&cfg),
        &Overrides {
            out: Some(out.clone()),
            ..Overrides::default()
        },
    )
    .unwrap();
    let outcome = run_experiment(&spec).unwrap();
    assert_eq!(outcome.failures, 1);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.contains("error")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("500")), "healthy row missing: {text}");
}

#[test]
fn validate_default_interference_passes() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "v.json",
        r#"{ "kind": "fig3", "sweep": { "axis": "h_m", "values": [200.0, 800.0] },
             "trials": 20000, "seed": 12 }"#,
    );
    let report = validate_against_oracle(&load_config(Some(&cfg), &Overrides::default()).unwrap())
        .unwrap();
    assert!(report.passed(), "{}", report.render());
    assert_eq!(report.checks.len(), 4, "mean + variance per altitude");
}

#[test]
fn validate_default_coverage_passes() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "v5.json",
        r#"{ "kind": "fig5", "sweep": { "axis": "h_m", "values": [300.0, 800.0] },
             "trials": 20000, "seed": 12 }"#,
    );
    let report = validate_against_oracle(&load_config(Some(&cfg), &Overrides::default()).unwrap())
        .unwrap();
    assert!(report.passed(), "{}", report.render());
}

#[test]
fn validate_zero_density_agrees_exactly() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "v0.json",
        r#"{ "kind": "custom-sweep", "sweep": { "axis": "lambda_per_m2", "values": [0.0] },
             "trials": 10000, "seed": 1 }"#,
    );
    let report = validate_against_oracle(&load_config(Some(&cfg), &Overrides::default()).unwrap())
        .unwrap();
    assert!(report.passed(), "{}", report.render());
    for check in &report.checks {
        assert_eq!(check.analytic, 0.0);
        assert_eq!(check.simulated, 0.0);
    }
}

#[test]
fn validate_requires_enough_trials() {
    let dir = tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "few.json",
        r#"{ "kind": "fig3", "trials": 500 }"#,
    );
    let err = validate_against_oracle(&load_config(Some(&cfg), &Overrides::default()).unwrap())
        .unwrap_err();
    assert!(format!("{err:#}").contains("10000"), "{err:#}");
}

#[test]
fn binary_interference_cdf_dumps_samples_and_summary() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("dump.csv");
    let output = Command::new(env!("CARGO_BIN_EXE_dronecell"))
        .args(["interference-cdf", "--trials", "200", "--seed", "9"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));

    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    for key in ["mean", "variance", "cv", "trials", "seed"] {
        assert!(summary.get(key).is_some(), "summary missing {key}");
    }
    assert_eq!(summary["trials"], 200);
    assert_eq!(summary["seed"], 9);

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,i_agg_watts"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn binary_rejects_invalid_config_with_nonzero_exit() {
    let dir = tempdir().unwrap();
    let cfg = write_config(&dir, "bad.json", r#"{ "kind": "fig2", "trials": 0 }"#);
    let output = Command::new(env!("CARGO_BIN_EXE_dronecell"))
        .arg("figure")
        .arg("fig2")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("trials"));
}
