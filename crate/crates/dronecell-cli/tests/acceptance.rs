//! Acceptance criterion 9: identical config + seed produce byte-identical
//! CSV output, whether sweep points run serially, on a wide thread pool, or
//! in separate process invocations.

use std::path::Path;
use std::process::Command;

use dronecell_cli::config::{load_config, ExperimentKind, Overrides};
use dronecell_cli::experiments::run_experiment;
use tempfile::tempdir;

fn spec_with_out(out: &Path, seed: u64) -> dronecell_cli::config::ExperimentSpec {
    let dir = out.parent().unwrap();
    let cfg = dir.join("fig3.json");
    std::fs::write(
        &cfg,
        r#"{ "kind": "fig3", "sweep": { "axis": "h_m", "values": [100.0, 500.0, 2000.0] },
             "trials": 5000 }"#,
    )
    .unwrap();
    load_config(
        Some(&cfg),
        &Overrides {
            kind: Some(ExperimentKind::Fig3),
            seed: Some(seed),
            out: Some(out.to_path_buf()),
            ..Overrides::default()
        },
    )
    .unwrap()
}

#[test]
fn criterion_9_determinism() {
    let dir = tempdir().unwrap();
    let mut failures: Vec<String> = Vec::new();

    // in-process: rerun, then serial vs wide thread pool
    let out = dir.path().join("a.csv");
    let spec = spec_with_out(&out, 42);
    run_experiment(&spec).unwrap();
    let first_csv = std::fs::read(&out).unwrap();
    let first_sidecar = std::fs::read(out.with_extension("csv.meta.json")).unwrap();

    run_experiment(&spec).unwrap();
    if std::fs::read(&out).unwrap() != first_csv {
        failures.push("rerun changed CSV bytes".into());
    }
    if std::fs::read(out.with_extension("csv.meta.json")).unwrap() != first_sidecar {
        failures.push("rerun changed sidecar bytes".into());
    }

    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    serial_pool.install(|| run_experiment(&spec)).unwrap();
    if std::fs::read(&out).unwrap() != first_csv {
        failures.push("single-thread execution changed CSV bytes".into());
    }
    let wide_pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    wide_pool.install(|| run_experiment(&spec)).unwrap();
    if std::fs::read(&out).unwrap() != first_csv {
        failures.push("8-thread execution changed CSV bytes".into());
    }

    // separate binary invocations agree byte for byte
    let cfg = dir.path().join("fig3.json");
    let mut process_outputs = Vec::new();
    for name in ["p1.csv", "p2.csv"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_dronecell"))
            .args(["figure", "fig3", "--seed", "42"])
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        process_outputs.push(std::fs::read(&out).unwrap());
    }
    if process_outputs[0] != process_outputs[1] {
        failures.push("two binary invocations disagreed".into());
    }
    if process_outputs[0] != first_csv {
        failures.push("binary output differs from in-process output".into());
    }

    if failures.is_empty() {
        println!(
            "ACCEPTANCE 9 (determinism): PASS — {} CSV bytes identical across rerun, 1-thread, \
             8-thread, and 2 process invocations",
            first_csv.len()
        );
    } else {
        println!("ACCEPTANCE 9 (determinism): FAIL — {}", failures.join("; "));
        panic!("criterion 9 failed: {}", failures.join("; "));
    }
}
