//! Experiment configuration: JSON schema, built-in default parameter sets, and
//! validation with diagnostics that name the offending key and its legal
//! range. dB values convert to linear watts exactly once, here.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dronecell::channel::EnvironmentParams;
use dronecell::interference::NetworkConfig;
use dronecell::montecarlo::DEFAULT_TRIALS;
use dronecell::units::db_to_linear;

/// Experiment kinds: the preset figure sweeps plus a free-form sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Mean aggregate interference vs antenna beamwidth.
    Fig2,
    /// Empirical CDF of the aggregate interference at several altitudes.
    Fig3,
    /// Empirical coefficient of variation vs density, at two altitudes.
    Fig4,
    /// Coverage probability vs altitude, closed form and simulation.
    Fig5,
    /// Normalized rate vs SIR threshold.
    Fig6,
    /// One recognized axis against the closed-form summary columns.
    CustomSweep,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3 => "fig3",
            ExperimentKind::Fig4 => "fig4",
            ExperimentKind::Fig5 => "fig5",
            ExperimentKind::Fig6 => "fig6",
            ExperimentKind::CustomSweep => "custom-sweep",
        }
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    BeamwidthDeg,
    LambdaPerM2,
    HM,
    TDb,
    RM,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::BeamwidthDeg => "beamwidth_deg",
            SweepAxis::LambdaPerM2 => "lambda_per_m2",
            SweepAxis::HM => "h_m",
            SweepAxis::TDb => "t_db",
            SweepAxis::RM => "r_m",
        }
    }
}

/// Fully resolved fixed parameters of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub lambda_per_m2: f64,
    pub p_interferer_dbw: f64,
    pub p_ue_dbw: f64,
    pub beamwidth_deg: f64,
    pub h_m: f64,
    pub r_m: f64,
    pub threshold_db: f64,
    pub environment: EnvironmentParams,
}

impl Default for Params {
    /// Reference defaults: interferer power -10 dB, density
    /// 1e-5 /m², h = 500 m, beamwidth 120°, plus UE power 0 dB, T = -2 dB,
    /// r = 200 m. The environment defaults to the synthetic table (2 GHz).
    fn default() -> Self {
        Params {
            lambda_per_m2: 1e-5,
            p_interferer_dbw: -10.0,
            p_ue_dbw: 0.0,
            beamwidth_deg: 120.0,
            h_m: 500.0,
            r_m: 200.0,
            threshold_db: -2.0,
            environment: EnvironmentParams::synthetic(),
        }
    }
}

impl Params {
    /// Builds the engine-level network config (dB → watts happens here).
    pub fn network(&self) -> Result<NetworkConfig> {
        NetworkConfig::new(
            self.lambda_per_m2,
            db_to_linear(self.p_interferer_dbw),
            db_to_linear(self.p_ue_dbw),
            self.beamwidth_deg.to_radians(),
            self.environment.clone(),
        )
        .map_err(|e| anyhow::anyhow!(e))
    }

    /// The linear SIR threshold.
    pub fn threshold_linear(&self) -> f64 {
        db_to_linear(self.threshold_db)
    }

    /// A copy with one swept parameter replaced.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Params {
        let mut p = self.clone();
        match axis {
            SweepAxis::BeamwidthDeg => p.beamwidth_deg = value,
            SweepAxis::LambdaPerM2 => p.lambda_per_m2 = value,
            SweepAxis::HM => p.h_m = value,
            SweepAxis::TDb => p.threshold_db = value,
            SweepAxis::RM => p.r_m = value,
        }
        p
    }

    fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, value: f64, range: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                bail!("{key} must be in {range}, got {value}")
            }
        };
        check(
            self.lambda_per_m2.is_finite() && self.lambda_per_m2 >= 0.0,
            "lambda_per_m2",
            self.lambda_per_m2,
            "[0, ∞)",
        )?;
        check(
            self.p_interferer_dbw.is_finite(),
            "p_interferer_dbw",
            self.p_interferer_dbw,
            "finite dBW",
        )?;
        check(self.p_ue_dbw.is_finite(), "p_ue_dbw", self.p_ue_dbw, "finite dBW")?;
        check(
            self.beamwidth_deg > 0.0 && self.beamwidth_deg <= 150.0,
            "beamwidth_deg",
            self.beamwidth_deg,
            "(0, 150] degrees",
        )?;
        check(
            self.h_m.is_finite() && self.h_m > 0.0,
            "h_m",
            self.h_m,
            "(0, ∞) meters",
        )?;
        check(
            self.r_m.is_finite() && self.r_m >= 0.0,
            "r_m",
            self.r_m,
            "[0, ∞) meters",
        )?;
        check(
            self.threshold_db.is_finite(),
            "threshold_db",
            self.threshold_db,
            "finite dB",
        )?;
        self.environment
            .validate()
            .map_err(|e| anyhow::anyhow!("environment: {e}"))?;
        Ok(())
    }
}

/// The swept axis and its values.
#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A fully validated experiment: every run is a pure function of this value.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub sweep: Sweep,
    pub fixed: Params,
    pub output_path: PathBuf,
    pub seed: u64,
    pub trials: u64,
}

/// Optional overrides coming from the command line; they win over the config
/// file, which wins over the built-in defaults.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub kind: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<ExperimentKind>,
    sweep: Option<RawSweep>,
    fixed: Option<RawFixed>,
    output_path: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: SweepAxis,
    values: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixed {
    lambda_per_m2: Option<f64>,
    p_interferer_dbw: Option<f64>,
    p_ue_dbw: Option<f64>,
    beamwidth_deg: Option<f64>,
    h_m: Option<f64>,
    r_m: Option<f64>,
    threshold_db: Option<f64>,
    environment: Option<EnvironmentParams>,
    environment_path: Option<PathBuf>,
}

fn default_sweep(kind: ExperimentKind) -> Result<Sweep> {
    let sweep = match kind {
        ExperimentKind::Fig2 => Sweep {
            axis: SweepAxis::BeamwidthDeg,
            values: (30..=150).step_by(10).map(f64::from).collect(),
        },
        ExperimentKind::Fig3 => Sweep {
            axis: SweepAxis::HM,
            values: vec![100.0, 500.0, 2000.0],
        },
        ExperimentKind::Fig4 => Sweep {
            axis: SweepAxis::LambdaPerM2,
            values: vec![1e-6, 3.162e-6, 1e-5, 3.162e-5, 1e-4],
        },
        ExperimentKind::Fig5 => Sweep {
            axis: SweepAxis::HM,
            values: vec![
                100.0, 150.0, 200.0, 300.0, 400.0, 500.0, 700.0, 1000.0, 1400.0, 2000.0, 3000.0,
            ],
        },
        ExperimentKind::Fig6 => Sweep {
            axis: SweepAxis::TDb,
            values: (-40..=40).map(|k| f64::from(k) / 2.0).collect(),
        },
        ExperimentKind::CustomSweep => {
            bail!("custom-sweep requires an explicit \"sweep\" block in the config")
        }
    };
    Ok(sweep)
}

// The axis each figure is defined over.
fn required_axis(kind: ExperimentKind) -> Option<SweepAxis> {
    match kind {
        ExperimentKind::Fig2 => Some(SweepAxis::BeamwidthDeg),
        ExperimentKind::Fig3 | ExperimentKind::Fig5 => Some(SweepAxis::HM),
        ExperimentKind::Fig4 => Some(SweepAxis::LambdaPerM2),
        ExperimentKind::Fig6 => Some(SweepAxis::TDb),
        ExperimentKind::CustomSweep => None,
    }
}

fn validate_sweep_values(axis: SweepAxis, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        bail!("sweep.values must not be empty");
    }
    for &v in values {
        let (ok, range) = match axis {
            SweepAxis::BeamwidthDeg => (v > 0.0 && v <= 150.0, "(0, 150] degrees"),
            SweepAxis::LambdaPerM2 => (v.is_finite() && v >= 0.0, "[0, ∞)"),
            SweepAxis::HM => (v.is_finite() && v > 0.0, "(0, ∞) meters"),
            SweepAxis::TDb => (v.is_finite(), "finite dB"),
            SweepAxis::RM => (v.is_finite() && v >= 0.0, "[0, ∞) meters"),
        };
        if !ok {
            bail!("sweep value {v} for axis {} must be in {range}", axis.as_str());
        }
    }
    Ok(())
}

/// Resolved parameters without a sweep: what the one-shot subcommands need.
#[derive(Debug, Clone)]
pub struct Settings {
    pub fixed: Params,
    pub seed: u64,
    pub trials: u64,
    pub output_path: Option<PathBuf>,
}

fn parse_raw(path: Option<&Path>) -> Result<RawConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", p.display()))
        }
        None => Ok(RawConfig::default()),
    }
}

fn resolve_fixed(raw: Option<RawFixed>) -> Result<Params> {
    let mut fixed = Params::default();
    if let Some(f) = raw {
        if f.environment.is_some() && f.environment_path.is_some() {
            bail!("fixed.environment and fixed.environment_path are mutually exclusive");
        }
        if let Some(env) = f.environment {
            fixed.environment = env;
        } else if let Some(env_path) = f.environment_path {
            fixed.environment = EnvironmentParams::from_json_file(&env_path)
                .with_context(|| format!("environment table {}", env_path.display()))?;
        }
        if let Some(v) = f.lambda_per_m2 {
            fixed.lambda_per_m2 = v;
        }
        if let Some(v) = f.p_interferer_dbw {
            fixed.p_interferer_dbw = v;
        }
        if let Some(v) = f.p_ue_dbw {
            fixed.p_ue_dbw = v;
        }
        if let Some(v) = f.beamwidth_deg {
            fixed.beamwidth_deg = v;
        }
        if let Some(v) = f.h_m {
            fixed.h_m = v;
        }
        if let Some(v) = f.r_m {
            fixed.r_m = v;
        }
        if let Some(v) = f.threshold_db {
            fixed.threshold_db = v;
        }
    }
    fixed.validate()?;
    Ok(fixed)
}

/// Loads the fixed parameters, seed and trial count; used by subcommands that
/// evaluate one configuration instead of a sweep.
pub fn load_settings(path: Option<&Path>, overrides: &Overrides) -> Result<Settings> {
    let raw = parse_raw(path)?;
    let trials = overrides.trials.or(raw.trials).unwrap_or(DEFAULT_TRIALS);
    if trials < 1 {
        bail!("trials must be >= 1, got {trials}");
    }
    Ok(Settings {
        fixed: resolve_fixed(raw.fixed)?,
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        trials,
        output_path: overrides.out.clone().or(raw.output_path),
    })
}

/// Loads, defaults, and validates a full experiment description.
///
/// `path = None` yields the pure default spec for the requested kind.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentSpec> {
    let raw = parse_raw(path)?;

    let kind = overrides
        .kind
        .or(raw.kind)
        .unwrap_or(ExperimentKind::CustomSweep);

    let fixed = resolve_fixed(raw.fixed)?;

    let sweep = match raw.sweep {
        Some(s) => {
            if let Some(required) = required_axis(kind) {
                if s.axis != required {
                    bail!(
                        "{} sweeps over {}, not {}",
                        kind.as_str(),
                        required.as_str(),
                        s.axis.as_str()
                    );
                }
            }
            validate_sweep_values(s.axis, &s.values)?;
            Sweep {
                axis: s.axis,
                values: s.values,
            }
        }
        None => default_sweep(kind)?,
    };

    let trials = overrides.trials.or(raw.trials).unwrap_or(DEFAULT_TRIALS);
    if trials < 1 {
        bail!("trials must be >= 1, got {trials}");
    }

    Ok(ExperimentSpec {
        kind,
        sweep,
        fixed,
        output_path: overrides
            .out
            .clone()
            .or(raw.output_path)
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", kind.as_str()))),
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        trials,
    })
}

/// Per-sweep-point seed: a splitmix64 step of the master seed and the point
/// index, so points get independent ChaCha key material.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
