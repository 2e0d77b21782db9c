//! Figure reproduction: one CSV row per sweep point plus a JSON sidecar with
//! the fully resolved configuration. Sweep points run in parallel; rows are
//! gathered and written in sweep order, so output bytes depend only on
//! (config, seed).

use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;

use dronecell::interference::{
    coefficient_of_variation, mean_aggregate_interference,
};
use dronecell::montecarlo::{simulate_coverage, simulate_distribution, CoverageMode, SimConfig};
use dronecell::performance::{
    coverage_probability, optimal_altitude, CoverageQuery, DEFAULT_ALTITUDE_BRACKET,
};
use dronecell::units::{db_to_linear, linear_to_db};

use crate::config::{derive_seed, ExperimentKind, ExperimentSpec, SweepAxis};

/// Cell used when a sweep point fails numerically; the run still emits the
/// row and exits nonzero at the end.
const ERROR_MARKER: &str = "error";

/// Number of CDF evaluation points emitted per fig3 curve.
const CDF_POINTS: usize = 200;

/// What a finished run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub csv_path: PathBuf,
    pub sidecar_path: PathBuf,
    pub rows: usize,
    /// Sweep points that failed numerically (their rows carry error markers).
    pub failures: usize,
}

fn fmt(x: f64) -> String {
    x.to_string()
}

struct PointOutput {
    rows: Vec<Vec<String>>,
    failed: bool,
}

fn error_row(cells: usize) -> Vec<String> {
    vec![ERROR_MARKER.to_string(); cells]
}

fn header(spec: &ExperimentSpec) -> Vec<&'static str> {
    match spec.kind {
        ExperimentKind::Fig2 => vec!["beamwidth_deg", "lambda", "mean_iagg_watts", "mean_iagg_db"],
        ExperimentKind::Fig3 => vec!["x_watts", "cdf", "h_m", "lambda"],
        ExperimentKind::Fig4 => vec!["lambda", "h_m", "cv"],
        ExperimentKind::Fig5 => vec!["h_m", "pcov_analytic", "pcov_sim", "env"],
        ExperimentKind::Fig6 => vec!["t_db", "rate_bps_hz", "pcov_at_argmax"],
        ExperimentKind::CustomSweep => match spec.sweep.axis {
            SweepAxis::BeamwidthDeg => vec!["beamwidth_deg", "mean_iagg_watts", "cv", "pcov_analytic"],
            SweepAxis::LambdaPerM2 => vec!["lambda_per_m2", "mean_iagg_watts", "cv", "pcov_analytic"],
            SweepAxis::HM => vec!["h_m", "mean_iagg_watts", "cv", "pcov_analytic"],
            SweepAxis::TDb => vec!["t_db", "mean_iagg_watts", "cv", "pcov_analytic"],
            SweepAxis::RM => vec!["r_m", "mean_iagg_watts", "cv", "pcov_analytic"],
        },
    }
}

fn fig2_point(spec: &ExperimentSpec, value: f64) -> Result<Vec<Vec<String>>> {
    let params = spec.fixed.with_axis(spec.sweep.axis, value);
    let mean = mean_aggregate_interference(&params.network()?)?;
    Ok(vec![vec![
        fmt(value),
        fmt(params.lambda_per_m2),
        fmt(mean),
        fmt(linear_to_db(mean)),
    ]])
}

fn fig3_point(spec: &ExperimentSpec, index: usize, value: f64) -> Result<Vec<Vec<String>>> {
    let params = spec.fixed.with_axis(spec.sweep.axis, value);
    let cfg = SimConfig::new(
        spec.trials,
        derive_seed(spec.seed, index as u64),
        params.h_m,
        params.network()?,
    )?;
    let dist = simulate_distribution(&cfg)?;
    let n = dist.samples.len();
    let points = CDF_POINTS.min(n);
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let idx = k * (n - 1) / (points - 1).max(1);
        rows.push(vec![
            fmt(dist.samples[idx]),
            fmt((idx + 1) as f64 / n as f64),
            fmt(params.h_m),
            fmt(params.lambda_per_m2),
        ]);
    }
    Ok(rows)
}

fn fig4_point(spec: &ExperimentSpec, index: usize, value: f64) -> Result<Vec<Vec<String>>> {
    // each density is simulated at the configured altitude and at twice it
    let params = spec.fixed.with_axis(spec.sweep.axis, value);
    let mut rows = Vec::with_capacity(2);
    for (sub, h) in [params.h_m, 2.0 * params.h_m].into_iter().enumerate() {
        let cfg = SimConfig::new(
            spec.trials,
            derive_seed(spec.seed, (2 * index + sub) as u64),
            h,
            params.network()?,
        )?;
        let dist = simulate_distribution(&cfg)?;
        rows.push(vec![fmt(params.lambda_per_m2), fmt(h), fmt(dist.cv())]);
    }
    Ok(rows)
}

fn fig5_point(spec: &ExperimentSpec, index: usize, value: f64) -> Result<Vec<Vec<String>>> {
    let params = spec.fixed.with_axis(spec.sweep.axis, value);
    let net = params.network()?;
    let query = CoverageQuery::new(params.r_m, params.h_m, params.threshold_db, net.clone())?;
    let analytic = coverage_probability(&query)?;
    let cfg = SimConfig::new(
        spec.trials,
        derive_seed(spec.seed, index as u64),
        params.h_m,
        net,
    )?;
    let simulated = simulate_coverage(
        &cfg,
        params.r_m,
        params.threshold_linear(),
        CoverageMode::Actual,
    )?;
    Ok(vec![vec![
        fmt(params.h_m),
        fmt(analytic),
        fmt(simulated),
        params.environment.name.clone(),
    ]])
}

fn fig6_point(spec: &ExperimentSpec, value: f64) -> Result<Vec<Vec<String>>> {
    let params = spec.fixed.with_axis(spec.sweep.axis, value);
    let best = optimal_altitude(
        params.r_m,
        params.threshold_db,
        &params.network()?,
        DEFAULT_ALTITUDE_BRACKET.0,
        DEFAULT_ALTITUDE_BRACKET.1,
    )?;
    let rate = (1.0 + db_to_linear(params.threshold_db)).log2() * best.value;
    Ok(vec![vec![fmt(value), fmt(rate), fmt(best.value)]])
}

fn custom_point(spec: &ExperimentSpec, value: f64) -> Result<Vec<Vec<String>>> {
    let params = spec.fixed.with_axis(spec.sweep.axis, value);
    let net = params.network()?;
    let mean = mean_aggregate_interference(&net)?;
    let cv = coefficient_of_variation(&net, params.h_m)
        .map(fmt)
        .unwrap_or_else(|_| "nan".to_string());
    let query = CoverageQuery::new(params.r_m, params.h_m, params.threshold_db, net)?;
    let pcov = coverage_probability(&query)?;
    Ok(vec![vec![fmt(value), fmt(mean), cv, fmt(pcov)]])
}

fn run_point(spec: &ExperimentSpec, index: usize, value: f64) -> PointOutput {
    let result = match spec.kind {
        ExperimentKind::Fig2 => fig2_point(spec, value),
        ExperimentKind::Fig3 => fig3_point(spec, index, value),
        ExperimentKind::Fig4 => fig4_point(spec, index, value),
        ExperimentKind::Fig5 => fig5_point(spec, index, value),
        ExperimentKind::Fig6 => fig6_point(spec, value),
        ExperimentKind::CustomSweep => custom_point(spec, value),
    };
    match result {
        Ok(rows) => PointOutput { rows, failed: false },
        Err(_) => PointOutput {
            rows: vec![error_row(header(spec).len())],
            failed: true,
        },
    }
}

/// Executes the sweep and writes the CSV plus its `.meta.json` sidecar.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutcome> {
    let outputs: Vec<PointOutput> = spec
        .sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| run_point(spec, index, value))
        .collect();

    let csv_path = spec.output_path.clone();
    let mut writer = csv::Writer::from_path(&csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    writer.write_record(header(spec))?;
    let mut rows = 0;
    let mut failures = 0;
    for output in outputs {
        failures += usize::from(output.failed);
        for row in output.rows {
            writer.write_record(&row)?;
            rows += 1;
        }
    }
    writer.flush()?;

    let sidecar_path = PathBuf::from(format!("{}.meta.json", csv_path.display()));
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(spec)?)
        .with_context(|| format!("cannot write {}", sidecar_path.display()))?;

    Ok(RunOutcome {
        csv_path,
        sidecar_path,
        rows,
        failures,
    })
}
