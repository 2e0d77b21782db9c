//! Air-to-ground propagation model: free-space path loss, angle-dependent
//! line-of-sight probability, and height-dependent log-normal shadowing.
//!
//! All angles are radians, all powers linear watts, all shadowing parameters
//! dB. The angle `phi` is the complement of the elevation angle: `phi = 0`
//! directly below the drone, growing towards the horizon.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Upper edge of the LoS-probability model's angular domain (5π/12 rad, 75°).
/// Beamwidths are capped so that no link angle ever exceeds this.
pub const MAX_PHI: f64 = 5.0 * PI / 12.0;

/// Largest supported antenna beamwidth (5π/6 rad, 150°): half of it must stay
/// inside [`MAX_PHI`].
pub const MAX_BEAMWIDTH: f64 = 5.0 * PI / 6.0;

/// ln(10)/10: converts a dB exponent into a natural-log exponent,
/// `10^(x/10) = exp(x * LN10_OVER_10)`.
pub(crate) const LN10_OVER_10: f64 = std::f64::consts::LN_10 / 10.0;

// Relative slack for angles that land a few ulps past MAX_PHI through
// tan/atan round-trips in samplers and optimizers.
pub(crate) const ANGLE_DUST: f64 = 1e-12;

/// Link classification: every UE↔drone link is either line-of-sight or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkKind {
    Los,
    Nlos,
}

/// Environment- and frequency-dependent channel constants.
///
/// The values are fitted externally per environment class (suburban, urban,
/// ...); this engine ingests them as configuration and never re-derives them.
/// `b_los`/`b_nlos` are per **radian**; tables fitted in degrees must be
/// converted before ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentParams {
    /// Human-readable label, e.g. "urban".
    pub name: String,
    /// Mean excessive path loss of LoS links, dB.
    #[serde(rename = "mu_los_db")]
    pub mu_los: f64,
    /// Mean excessive path loss of NLoS links, dB.
    #[serde(rename = "mu_nlos_db")]
    pub mu_nlos: f64,
    /// Shadowing spread of LoS links at phi = 0, dB.
    #[serde(rename = "a_los_db")]
    pub a_los: f64,
    /// Shadowing spread of NLoS links at phi = 0, dB.
    #[serde(rename = "a_nlos_db")]
    pub a_nlos: f64,
    /// Exponential growth rate of the LoS shadowing spread, 1/radian.
    #[serde(rename = "b_los_per_rad")]
    pub b_los: f64,
    /// Exponential growth rate of the NLoS shadowing spread, 1/radian.
    #[serde(rename = "b_nlos_per_rad")]
    pub b_nlos: f64,
    /// LoS probability scale factor.
    pub beta1: f64,
    /// LoS probability exponent.
    pub beta2: f64,
    /// Carrier frequency, Hz.
    pub frequency_hz: f64,
}

impl EnvironmentParams {
    /// Checks the parameter invariants: `mu_nlos >= mu_los`, non-negative
    /// shadowing scales, positive exponents and frequency, all finite.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mu_los_db", self.mu_los),
            ("mu_nlos_db", self.mu_nlos),
            ("a_los_db", self.a_los),
            ("a_nlos_db", self.a_nlos),
            ("b_los_per_rad", self.b_los),
            ("b_nlos_per_rad", self.b_nlos),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("frequency_hz", self.frequency_hz),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::EnvironmentSchema(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        if self.mu_nlos < self.mu_los {
            return Err(Error::EnvironmentSchema(format!(
                "mu_nlos_db ({}) must be >= mu_los_db ({})",
                self.mu_nlos, self.mu_los
            )));
        }
        if self.a_los < 0.0 || self.a_nlos < 0.0 {
            return Err(Error::EnvironmentSchema(
                "a_los_db and a_nlos_db must be >= 0".into(),
            ));
        }
        if self.beta1 <= 0.0 || self.beta2 <= 0.0 {
            return Err(Error::EnvironmentSchema(
                "beta1 and beta2 must be > 0".into(),
            ));
        }
        if self.frequency_hz <= 0.0 {
            return Err(Error::EnvironmentSchema(format!(
                "frequency_hz must be > 0, got {}",
                self.frequency_hz
            )));
        }
        Ok(())
    }

    /// Parses an environment table from its JSON schema. Unknown or missing
    /// keys are rejected, then the numeric invariants are checked.
    pub fn from_json_str(json: &str) -> Result<Self> {
        let env: EnvironmentParams = serde_json::from_str(json)
            .map_err(|e| Error::EnvironmentSchema(e.to_string()))?;
        env.validate()?;
        Ok(env)
    }

    /// Loads an environment table from a JSON file.
    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Synthetic parameter set used by the test and property suites.
    ///
    /// The values are plausible for an urban-like environment at 2 GHz but
    /// are NOT fitted to any measurement campaign; real studies must supply
    /// their own table via [`EnvironmentParams::from_json_file`].
    pub fn synthetic() -> Self {
        EnvironmentParams {
            name: "synthetic-test".to_string(),
            mu_los: 1.0,
            mu_nlos: 23.0,
            a_los: 1.6,
            a_nlos: 3.0,
            b_los: 0.3,
            b_nlos: 0.4,
            beta1: 0.9,
            beta2: 0.11,
            frequency_hz: 2.0e9,
        }
    }

    pub(crate) fn mu(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Los => self.mu_los,
            LinkKind::Nlos => self.mu_nlos,
        }
    }

    pub(crate) fn shadowing_scale(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Los => self.a_los,
            LinkKind::Nlos => self.a_nlos,
        }
    }

    pub(crate) fn shadowing_growth(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Los => self.b_los,
            LinkKind::Nlos => self.b_nlos,
        }
    }
}

/// Geometry of one drone↔ground link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Drone altitude, m.
    pub h: f64,
    /// Ground distance from the terminal to the drone's nadir point, m.
    pub r: f64,
    /// Complement of the elevation angle, rad: `atan(r/h)`.
    pub phi: f64,
    /// Slant distance, m: `sqrt(h^2 + r^2)`.
    pub d: f64,
}

/// Builds the link geometry for a terminal at ground distance `r` from the
/// nadir of a drone at altitude `h`.
pub fn geometry_from(r: f64, h: f64) -> Result<LinkGeometry> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!(
            "altitude h must be finite and > 0, got {h}"
        )));
    }
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!(
            "ground distance r must be finite and >= 0, got {r}"
        )));
    }
    Ok(LinkGeometry {
        h,
        r,
        phi: (r / h).atan(),
        d: r.hypot(h),
    })
}

/// `(4π f / c)^2`: the frequency-dependent factor of the free-space loss.
pub fn free_space_factor(frequency_hz: f64) -> f64 {
    debug_assert!(frequency_hz > 0.0);
    let k = 4.0 * PI * frequency_hz / SPEED_OF_LIGHT;
    k * k
}

/// Free-space path loss as a linear factor: `(4π f d / c)^2`, evaluated as
/// `A_f * h^2 / cos^2(phi)` so that scaling in `h` stays exact.
pub fn free_space_path_loss(geom: &LinkGeometry, frequency_hz: f64) -> f64 {
    let over_cos = geom.h / geom.phi.cos();
    free_space_factor(frequency_hz) * over_cos * over_cos
}

/// Probability that a link at angle `phi` is line-of-sight:
/// `beta1 * (5π/12 - phi)^beta2`, clamped into [0, 1].
///
/// The formula's base goes negative past [`MAX_PHI`], so larger angles are a
/// domain error.
pub fn los_probability(phi: f64, env: &EnvironmentParams) -> Result<f64> {
    if !phi.is_finite() || !(0.0..=MAX_PHI * (1.0 + ANGLE_DUST)).contains(&phi) {
        return Err(Error::Domain(format!(
            "phi must be in [0, 5π/12] ≈ [0, {MAX_PHI:.6}], got {phi}"
        )));
    }
    Ok(los_probability_clamped(phi, env))
}

// Same formula with the angle snapped into the model domain; for internal
// callers that already guarantee phi <= MAX_PHI up to rounding dust.
pub(crate) fn los_probability_clamped(phi: f64, env: &EnvironmentParams) -> f64 {
    let base = (MAX_PHI - phi.min(MAX_PHI)).max(0.0);
    (env.beta1 * base.powf(env.beta2)).clamp(0.0, 1.0)
}

/// Shadowing spread in dB at angle `phi`: `a * exp(b * phi)`.
pub fn shadowing_sigma(phi: f64, kind: LinkKind, env: &EnvironmentParams) -> f64 {
    env.shadowing_scale(kind) * (env.shadowing_growth(kind) * phi).exp()
}

/// First moment of the inverse shadowing, `E[1/Ψ] = 10^((-μ + v σ²/2)/10)`
/// with `v = ln(10)/10`.
pub fn inverse_shadowing_mean(phi: f64, kind: LinkKind, env: &EnvironmentParams) -> f64 {
    let sigma = shadowing_sigma(phi, kind, env);
    10f64.powf((-env.mu(kind) + LN10_OVER_10 * sigma * sigma / 2.0) / 10.0)
}

/// Second moment of the inverse shadowing, `E[(1/Ψ)²] = 10^((-μ + v σ²)/5)`.
pub fn inverse_shadowing_second_moment(phi: f64, kind: LinkKind, env: &EnvironmentParams) -> f64 {
    let sigma = shadowing_sigma(phi, kind, env);
    10f64.powf((-env.mu(kind) + LN10_OVER_10 * sigma * sigma) / 5.0)
}

/// Draws one excessive-path-loss sample `Ψ > 0`: Gaussian in dB with mean
/// `μ` and spread `σ(phi)`, mapped to linear.
pub fn sample_shadowing(
    phi: f64,
    kind: LinkKind,
    env: &EnvironmentParams,
    rng: &mut impl Rng,
) -> f64 {
    let sigma = shadowing_sigma(phi, kind, env);
    let gauss_db = Normal::new(env.mu(kind), sigma)
        .expect("shadowing sigma is finite and non-negative")
        .sample(rng);
    10f64.powf(gauss_db / 10.0)
}
