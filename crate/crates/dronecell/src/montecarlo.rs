//! Poisson-field simulator: draws interferer constellations inside the main
//! lobe, realizes the aggregate interference per trial, and simulates link
//! coverage with either the realized or the mean-field interference.
//!
//! Trials are mutually independent. Each trial draws from its own ChaCha
//! stream derived from `(master_seed, trial_index)`, so serial and parallel
//! execution produce bit-identical results; per-trial values are reduced in
//! trial order.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::channel::{
    free_space_factor, geometry_from, los_probability, sample_shadowing, LinkKind, ANGLE_DUST,
    MAX_PHI,
};
use crate::error::{Error, Result};
use crate::interference::{mean_aggregate_interference, NetworkConfig};

/// Ceiling on the expected interferer count per realization; anything above
/// this signals a nonsensical `lambda * h²` combination.
const MAX_MEAN_COUNT: f64 = 1e9;

/// Default number of network realizations.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of independent network realizations.
    pub trials: u64,
    /// Seed from which every per-trial random stream is derived.
    pub master_seed: u64,
    /// Drone altitude, m.
    pub h: f64,
    /// Network parameters.
    pub net: NetworkConfig,
}

impl SimConfig {
    pub fn new(trials: u64, master_seed: u64, h: f64, net: NetworkConfig) -> Result<Self> {
        if trials < 1 {
            return Err(Error::Domain("trials must be >= 1".into()));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Domain(format!("h must be finite and > 0, got {h}")));
        }
        Ok(SimConfig {
            trials,
            master_seed,
            h,
            net,
        })
    }

    /// The deterministic random stream of one trial.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        rng
    }
}

/// One realized interferer constellation. Received power depends on position
/// only through the angle, so azimuth is never sampled; this reduction is
/// exact.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    /// Angle of each interferer, rad, in `[0, beamwidth/2]`.
    pub angles: Vec<f64>,
    /// LoS/NLoS tag of each interferer.
    pub kinds: Vec<LinkKind>,
    /// Linear excessive-path-loss draw of each interferer.
    pub shadowings: Vec<f64>,
}

impl FieldRealization {
    pub fn count(&self) -> usize {
        self.angles.len()
    }
}

/// Monte Carlo sample summary: sorted samples plus moments accumulated in
/// trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    /// Samples sorted ascending, W.
    pub samples: Vec<f64>,
    /// Sample mean, W.
    pub mean: f64,
    /// Unbiased sample variance, W².
    pub variance: f64,
    /// `sqrt(variance / n)`, W.
    pub standard_error_of_mean: f64,
}

impl EmpiricalDistribution {
    /// Builds the summary from trial-ordered samples (at least two).
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::Domain(format!(
                "an empirical distribution needs at least 2 samples, got {n}"
            )));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / (n as f64 - 1.0);
        let mut sorted = samples;
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution {
            samples: sorted,
            mean,
            variance,
            standard_error_of_mean: (variance / n as f64).sqrt(),
        })
    }

    /// Right-continuous empirical CDF: fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let below = self.samples.partition_point(|s| *s <= x);
        below as f64 / self.samples.len() as f64
    }

    /// Empirical coefficient of variation.
    pub fn cv(&self) -> f64 {
        self.variance.sqrt() / self.mean
    }
}

/// Expected interferer count: `lambda * π (h tan(beamwidth/2))²`.
pub fn expected_interferer_count(net: &NetworkConfig, h: f64) -> f64 {
    let radius = h * (net.beamwidth / 2.0).tan();
    net.lambda * std::f64::consts::PI * radius * radius
}

/// Draws the number of interferers inside the main lobe: Poisson with mean
/// `lambda |C|`.
pub fn sample_interferer_count(net: &NetworkConfig, h: f64, rng: &mut impl Rng) -> Result<u64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!("h must be finite and > 0, got {h}")));
    }
    let mean = expected_interferer_count(net, h);
    if mean == 0.0 {
        return Ok(0);
    }
    if !mean.is_finite() || mean > MAX_MEAN_COUNT {
        return Err(Error::Domain(format!(
            "expected interferer count {mean:.3e} exceeds the supported maximum {MAX_MEAN_COUNT:.0e}"
        )));
    }
    let poisson = Poisson::new(mean).expect("mean is finite and positive");
    Ok(poisson.sample(rng) as u64)
}

// Angle of a point uniform over the main-lobe disc, as a function of the
// uniform draw u: the ground radius is h tan(half_beam) sqrt(u), and h
// cancels out of atan(radius/h).
fn angle_quantile(u: f64, half_beam: f64) -> f64 {
    (half_beam.tan() * u.sqrt()).atan().min(half_beam)
}

/// Draws one interferer angle. The CDF is `tan²(φ)/tan²(beamwidth/2)`, the
/// angular law of a point uniform over the illuminated disc.
pub fn sample_interferer_angle(net: &NetworkConfig, rng: &mut impl Rng) -> f64 {
    angle_quantile(rng.random::<f64>(), net.beamwidth / 2.0)
}

/// Draws a full interferer constellation: count, angles, LoS tags, and
/// shadowing values.
pub fn realize_field(cfg: &SimConfig, rng: &mut impl Rng) -> Result<FieldRealization> {
    let count = sample_interferer_count(&cfg.net, cfg.h, rng)? as usize;
    let mut angles = Vec::with_capacity(count);
    let mut kinds = Vec::with_capacity(count);
    let mut shadowings = Vec::with_capacity(count);
    for _ in 0..count {
        let phi = sample_interferer_angle(&cfg.net, rng);
        let p_los = los_probability(phi, &cfg.net.env)?;
        let kind = if rng.random_bool(p_los) {
            LinkKind::Los
        } else {
            LinkKind::Nlos
        };
        let shadowing = sample_shadowing(phi, kind, &cfg.net.env, rng);
        angles.push(phi);
        kinds.push(kind);
        shadowings.push(shadowing);
    }
    Ok(FieldRealization {
        angles,
        kinds,
        shadowings,
    })
}

/// Sums the received powers of one realization:
/// `Σ P_I cos²(φ_i) / (A_f h² Ψ_i)`, in W.
pub fn aggregate_interference(field: &FieldRealization, cfg: &SimConfig) -> f64 {
    let a_f = free_space_factor(cfg.net.env.frequency_hz);
    let mut total = 0.0;
    for (phi, shadowing) in field.angles.iter().zip(&field.shadowings) {
        let over_cos = cfg.h / phi.cos();
        let path_loss = a_f * over_cos * over_cos;
        total += cfg.net.p_interferer / (path_loss * shadowing);
    }
    total
}

/// Runs all trials and returns one aggregate-interference sample per trial,
/// in trial order.
pub fn simulate_samples(cfg: &SimConfig) -> Result<Vec<f64>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = cfg.trial_rng(trial);
            let field = realize_field(cfg, &mut rng)?;
            Ok(aggregate_interference(&field, cfg))
        })
        .collect()
}

/// Runs all trials and summarizes the aggregate-interference distribution.
pub fn simulate_distribution(cfg: &SimConfig) -> Result<EmpiricalDistribution> {
    if cfg.trials < 2 {
        return Err(Error::Domain("simulate_distribution needs trials >= 2".into()));
    }
    EmpiricalDistribution::from_samples(simulate_samples(cfg)?)
}

/// Which interference value enters the per-trial SIR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMode {
    /// The realized aggregate interference of the trial's own field.
    Actual,
    /// The closed-form mean interference, identical across trials.
    MeanField,
}

/// Simulates the link coverage probability for a UE at ground distance `r`.
///
/// Per trial the UE link is redrawn (LoS tag and shadowing), the SIR is
/// `P_U / (I · L_f · Ψ)`, and the trial counts as covered when SIR exceeds
/// the linear threshold. Trials with zero interference have infinite SIR and
/// count as covered.
pub fn simulate_coverage(
    cfg: &SimConfig,
    r: f64,
    threshold: f64,
    mode: CoverageMode,
) -> Result<f64> {
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::Domain(format!(
            "threshold must be finite and >= 0, got {threshold}"
        )));
    }
    let geom = geometry_from(r, cfg.h)?;
    if geom.phi > MAX_PHI * (1.0 + ANGLE_DUST) {
        return Err(Error::Domain(format!(
            "UE angle {:.6} rad exceeds the channel model limit 5π/12",
            geom.phi
        )));
    }
    let phi = geom.phi.min(MAX_PHI);
    let p_los = los_probability(phi, &cfg.net.env)?;
    let over_cos = cfg.h / phi.cos();
    let path_loss = free_space_factor(cfg.net.env.frequency_hz) * over_cos * over_cos;
    let mean_interference = match mode {
        CoverageMode::MeanField => mean_aggregate_interference(&cfg.net)?,
        CoverageMode::Actual => 0.0,
    };

    let covered: Result<Vec<bool>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = cfg.trial_rng(trial);
            let interference = match mode {
                CoverageMode::Actual => {
                    let field = realize_field(cfg, &mut rng)?;
                    aggregate_interference(&field, cfg)
                }
                CoverageMode::MeanField => mean_interference,
            };
            let kind = if rng.random_bool(p_los) {
                LinkKind::Los
            } else {
                LinkKind::Nlos
            };
            let shadowing = sample_shadowing(phi, kind, &cfg.net.env, &mut rng);
            if interference <= 0.0 {
                return Ok(true); // infinite SIR
            }
            let sir = cfg.net.p_ue / (interference * path_loss * shadowing);
            Ok(sir > threshold)
        })
        .collect();
    let covered = covered?;
    Ok(covered.iter().filter(|c| **c).count() as f64 / cfg.trials as f64)
}
