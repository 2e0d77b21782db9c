use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::json;

use dronecell::interference::{interference_stats, mean_aggregate_interference};
use dronecell::montecarlo::{
    simulate_coverage, simulate_samples, CoverageMode, EmpiricalDistribution, SimConfig,
};
use dronecell::performance::{
    coverage_probability, normalized_rate, optimal_altitude, optimal_threshold, CoverageQuery,
    DEFAULT_ALTITUDE_BRACKET,
};
use dronecell::units::linear_to_db;
use dronecell_cli::config::{load_config, load_settings, ExperimentKind, ExperimentSpec, Overrides, Settings};
use dronecell_cli::experiments::run_experiment;
use dronecell_cli::validate::validate_against_oracle;

/// Threshold search bracket used by `optimize-threshold`, dB.
const THRESHOLD_BRACKET_DB: (f64, f64) = (-10.0, 10.0);

#[derive(Parser)]
#[command(
    name = "dronecell",
    about = "Drone-uplink interference engine: closed forms, Monte Carlo oracle, and figure sweeps",
    version
)]
struct Cli {
    /// JSON experiment config; omitted fields fall back to the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all Monte Carlo work (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo trials (overrides the config).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output path (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form aggregate-interference statistics.
    InterferenceMean,
    /// Simulate the interference distribution; dumps samples as CSV and
    /// prints a JSON summary.
    InterferenceCdf,
    /// Coverage probability at the configured (r, h, T); simulated estimates
    /// are included when --trials is given.
    Coverage,
    /// Normalized transmission rate at the configured threshold.
    Rate,
    /// Altitude maximizing the coverage probability.
    OptimizeAltitude,
    /// SIR threshold maximizing the normalized rate.
    OptimizeThreshold,
    /// Run one of the preset figure sweeps and write it as CSV (+ .meta.json sidecar).
    Figure {
        #[arg(value_enum)]
        kind: ExperimentKind,
    },
    /// Check the closed forms against the Monte Carlo oracle.
    Validate,
}

fn overrides_for(cli: &Cli, kind: Option<ExperimentKind>) -> Overrides {
    Overrides {
        kind,
        seed: cli.seed,
        trials: cli.trials,
        out: cli.out.clone(),
    }
}

fn spec_for(cli: &Cli, kind: Option<ExperimentKind>) -> Result<ExperimentSpec> {
    load_config(cli.config.as_deref(), &overrides_for(cli, kind))
}

fn settings_for(cli: &Cli) -> Result<Settings> {
    load_settings(cli.config.as_deref(), &overrides_for(cli, None))
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::InterferenceMean => {
            let spec = settings_for(cli)?;
            let net = spec.fixed.network()?;
            let mean = mean_aggregate_interference(&net)?;
            let stats = interference_stats(&net, spec.fixed.h_m).ok();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "lambda_per_m2": spec.fixed.lambda_per_m2,
                    "beamwidth_deg": spec.fixed.beamwidth_deg,
                    "h_m": spec.fixed.h_m,
                    "mean_iagg_watts": mean,
                    "mean_iagg_dbw": linear_to_db(mean),
                    "variance_iagg_watts2": stats.as_ref().map(|s| s.variance),
                    "cv": stats.as_ref().map(|s| s.cv),
                }))?
            );
        }
        Command::InterferenceCdf => {
            let spec = settings_for(cli)?;
            let out = spec
                .output_path
                .clone()
                .unwrap_or_else(|| PathBuf::from("interference_cdf.csv"));
            let cfg =
                SimConfig::new(spec.trials, spec.seed, spec.fixed.h_m, spec.fixed.network()?)?;
            let samples = simulate_samples(&cfg)?;
            let mut writer = csv::Writer::from_path(&out)?;
            writer.write_record(["trial", "i_agg_watts"])?;
            for (trial, value) in samples.iter().enumerate() {
                writer.write_record(&[trial.to_string(), value.to_string()])?;
            }
            writer.flush()?;
            let dist = EmpiricalDistribution::from_samples(samples)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "mean": dist.mean,
                    "variance": dist.variance,
                    "cv": dist.cv(),
                    "trials": spec.trials,
                    "seed": spec.seed,
                }))?
            );
            eprintln!("samples written to {}", out.display());
        }
        Command::Coverage => {
            let spec = settings_for(cli)?;
            let net = spec.fixed.network()?;
            let query = CoverageQuery::new(
                spec.fixed.r_m,
                spec.fixed.h_m,
                spec.fixed.threshold_db,
                net.clone(),
            )?;
            let analytic = coverage_probability(&query)?;
            let mut output = json!({
                "r_m": spec.fixed.r_m,
                "h_m": spec.fixed.h_m,
                "threshold_db": spec.fixed.threshold_db,
                "pcov_analytic": analytic,
            });
            if cli.trials.is_some() {
                let cfg = SimConfig::new(spec.trials, spec.seed, spec.fixed.h_m, net)?;
                let t = spec.fixed.threshold_linear();
                output["pcov_sim_meanfield"] =
                    json!(simulate_coverage(&cfg, spec.fixed.r_m, t, CoverageMode::MeanField)?);
                output["pcov_sim_actual"] =
                    json!(simulate_coverage(&cfg, spec.fixed.r_m, t, CoverageMode::Actual)?);
            }
            println!("{}", serde_json::to_string_pretty(&output)?);
        }
        Command::Rate => {
            let spec = settings_for(cli)?;
            let net = spec.fixed.network()?;
            let best = optimal_altitude(
                spec.fixed.r_m,
                spec.fixed.threshold_db,
                &net,
                DEFAULT_ALTITUDE_BRACKET.0,
                DEFAULT_ALTITUDE_BRACKET.1,
            )?;
            let rate = normalized_rate(
                spec.fixed.threshold_db,
                spec.fixed.r_m,
                &net,
                DEFAULT_ALTITUDE_BRACKET,
            )?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "threshold_db": spec.fixed.threshold_db,
                    "rate_bps_hz": rate,
                    "h_star_m": best.argmax,
                    "pcov_at_h_star": best.value,
                }))?
            );
        }
        Command::OptimizeAltitude => {
            let spec = settings_for(cli)?;
            let best = optimal_altitude(
                spec.fixed.r_m,
                spec.fixed.threshold_db,
                &spec.fixed.network()?,
                DEFAULT_ALTITUDE_BRACKET.0,
                DEFAULT_ALTITUDE_BRACKET.1,
            )?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "h_star_m": best.argmax,
                    "pcov": best.value,
                    "at_boundary": best.at_boundary,
                    "evaluations": best.trace.len(),
                }))?
            );
        }
        Command::OptimizeThreshold => {
            let spec = settings_for(cli)?;
            let best = optimal_threshold(
                spec.fixed.r_m,
                &spec.fixed.network()?,
                THRESHOLD_BRACKET_DB.0,
                THRESHOLD_BRACKET_DB.1,
            )?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "t_star_db": best.argmax,
                    "rate_bps_hz": best.value,
                    "at_boundary": best.at_boundary,
                    "evaluations": best.trace.len(),
                }))?
            );
        }
        Command::Figure { kind } => {
            let spec = spec_for(cli, Some(*kind))?;
            let outcome = run_experiment(&spec)?;
            eprintln!(
                "{}: {} rows -> {} (+ {})",
                spec.kind.as_str(),
                outcome.rows,
                outcome.csv_path.display(),
                outcome.sidecar_path.display()
            );
            if outcome.failures > 0 {
                eprintln!(
                    "{} sweep point(s) failed; rows carry error markers",
                    outcome.failures
                );
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Validate => {
            let spec = spec_for(cli, None)?;
            let report = validate_against_oracle(&spec)?;
            print!("{}", report.render());
            if let Some(out) = &cli.out {
                std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
                eprintln!("report written to {}", out.display());
            }
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
