//! Closed-form statistics of the aggregate interference a drone receives
//! from a Poisson field of ground transmitters inside its main lobe.
//!
//! The mean is altitude-independent; the variance falls off as `1/h²`. Both
//! reduce to angular integrals (`upsilon_mu`, `upsilon_sigma`) evaluated by
//! adaptive quadrature.

use std::f64::consts::PI;

use crate::channel::{
    free_space_factor, inverse_shadowing_mean, inverse_shadowing_second_moment,
    los_probability_clamped, EnvironmentParams, LinkKind, MAX_BEAMWIDTH,
};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadratureSpec};

/// Network-level parameters shared by the closed forms and the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Interferer density, nodes per m².
    pub lambda: f64,
    /// Transmit power of each interferer, W.
    pub p_interferer: f64,
    /// Transmit power of the served UE, W.
    pub p_ue: f64,
    /// Full beamwidth of the drone's downward antenna, rad.
    pub beamwidth: f64,
    /// Channel environment table.
    pub env: EnvironmentParams,
}

impl NetworkConfig {
    pub fn new(
        lambda: f64,
        p_interferer: f64,
        p_ue: f64,
        beamwidth: f64,
        env: EnvironmentParams,
    ) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if !p_interferer.is_finite() || p_interferer <= 0.0 {
            return Err(Error::Domain(format!(
                "p_interferer must be finite and > 0 W, got {p_interferer}"
            )));
        }
        if !p_ue.is_finite() || p_ue <= 0.0 {
            return Err(Error::Domain(format!(
                "p_ue must be finite and > 0 W, got {p_ue}"
            )));
        }
        if !beamwidth.is_finite() || beamwidth <= 0.0 || beamwidth > MAX_BEAMWIDTH {
            return Err(Error::Domain(format!(
                "beamwidth must be in (0, 5π/6] rad ≈ (0°, 150°], got {beamwidth}"
            )));
        }
        env.validate()?;
        Ok(NetworkConfig {
            lambda,
            p_interferer,
            p_ue,
            beamwidth,
            env,
        })
    }
}

/// Mean, variance and coefficient of variation of the aggregate interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceStats {
    /// Mean aggregate interference, W.
    pub mean: f64,
    /// Variance of the aggregate interference, W².
    pub variance: f64,
    /// Coefficient of variation, `sqrt(variance)/mean`.
    pub cv: f64,
}

fn check_half_beam(beamwidth: f64) -> Result<f64> {
    if !beamwidth.is_finite() || !(0.0..=MAX_BEAMWIDTH).contains(&beamwidth) {
        return Err(Error::Domain(format!(
            "beamwidth must be in [0, 5π/6] rad, got {beamwidth}"
        )));
    }
    Ok(beamwidth / 2.0)
}

/// Angular integral behind the interference mean:
/// `∫ tan(φ) [P_LoS(φ) M_LoS(φ) + (1 - P_LoS(φ)) M_NLoS(φ)] dφ`
/// over `[0, beamwidth/2]`, where `M` is the first inverse-shadowing moment.
pub fn upsilon_mu(beamwidth: f64, env: &EnvironmentParams, quad: &QuadratureSpec) -> Result<f64> {
    let half = check_half_beam(beamwidth)?;
    let q = integrate(
        |phi| {
            let p_los = los_probability_clamped(phi, env);
            phi.tan()
                * (p_los * inverse_shadowing_mean(phi, LinkKind::Los, env)
                    + (1.0 - p_los) * inverse_shadowing_mean(phi, LinkKind::Nlos, env))
        },
        0.0,
        half,
        quad,
    )?;
    Ok(q.value)
}

/// Angular integral behind the interference variance:
/// `∫ sin(2φ) [P_LoS(φ) S_LoS(φ) + (1 - P_LoS(φ)) S_NLoS(φ)] dφ`
/// over `[0, beamwidth/2]`, where `S` is the second inverse-shadowing moment.
pub fn upsilon_sigma(beamwidth: f64, env: &EnvironmentParams, quad: &QuadratureSpec) -> Result<f64> {
    let half = check_half_beam(beamwidth)?;
    let q = integrate(
        |phi| {
            let p_los = los_probability_clamped(phi, env);
            (2.0 * phi).sin()
                * (p_los * inverse_shadowing_second_moment(phi, LinkKind::Los, env)
                    + (1.0 - p_los) * inverse_shadowing_second_moment(phi, LinkKind::Nlos, env))
        },
        0.0,
        half,
        quad,
    )?;
    Ok(q.value)
}

/// Mean aggregate interference in watts: `(2πλ P_I / A_f) Υ_μ(φ_A)`.
///
/// Independent of the drone altitude: higher flight trades per-node power
/// for a proportionally larger illuminated disc.
pub fn mean_aggregate_interference(cfg: &NetworkConfig) -> Result<f64> {
    if cfg.lambda == 0.0 {
        return Ok(0.0);
    }
    let upsilon = upsilon_mu(cfg.beamwidth, &cfg.env, &QuadratureSpec::default())?;
    let a_f = free_space_factor(cfg.env.frequency_hz);
    Ok(2.0 * PI * cfg.lambda * cfg.p_interferer / a_f * upsilon)
}

/// Variance of the aggregate interference in W²:
/// `(πλ P_I² / (A_f² h²)) Υ_σ(φ_A)`.
pub fn variance_aggregate_interference(cfg: &NetworkConfig, h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!("h must be finite and > 0, got {h}")));
    }
    if cfg.lambda == 0.0 {
        return Ok(0.0);
    }
    let upsilon = upsilon_sigma(cfg.beamwidth, &cfg.env, &QuadratureSpec::default())?;
    let a_f = free_space_factor(cfg.env.frequency_hz);
    Ok(PI * cfg.lambda * cfg.p_interferer * cfg.p_interferer / (a_f * a_f * h * h) * upsilon)
}

/// Coefficient of variation `sqrt(variance)/mean`; proportional to
/// `1/(h sqrt(lambda))`.
pub fn coefficient_of_variation(cfg: &NetworkConfig, h: f64) -> Result<f64> {
    if cfg.lambda <= 0.0 {
        return Err(Error::Domain(
            "coefficient of variation is undefined for lambda = 0".into(),
        ));
    }
    let mean = mean_aggregate_interference(cfg)?;
    if mean <= 0.0 {
        return Err(Error::Domain(
            "coefficient of variation is undefined for zero mean interference".into(),
        ));
    }
    let variance = variance_aggregate_interference(cfg, h)?;
    Ok(variance.sqrt() / mean)
}

/// Bundles mean, variance and CV for one altitude.
pub fn interference_stats(cfg: &NetworkConfig, h: f64) -> Result<InterferenceStats> {
    let mean = mean_aggregate_interference(cfg)?;
    if mean <= 0.0 {
        return Err(Error::Domain(
            "interference stats are undefined for zero mean interference".into(),
        ));
    }
    let variance = variance_aggregate_interference(cfg, h)?;
    Ok(InterferenceStats {
        mean,
        variance,
        cv: variance.sqrt() / mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn synthetic_net(lambda: f64, beamwidth: f64) -> NetworkConfig {
        NetworkConfig::new(lambda, 0.1, 1.0, beamwidth, EnvironmentParams::synthetic()).unwrap()
    }

    // sigma = 0 and equal mu collapse both integrals to elementary
    // antiderivatives of tan and sin(2φ).
    fn degenerate_env(mu: f64) -> EnvironmentParams {
        EnvironmentParams {
            mu_los: mu,
            mu_nlos: mu,
            a_los: 0.0,
            a_nlos: 0.0,
            b_los: 0.0,
            b_nlos: 0.0,
            ..EnvironmentParams::synthetic()
        }
    }

    #[test]
    fn network_config_rejects_wide_beam() {
        let env = EnvironmentParams::synthetic();
        assert!(NetworkConfig::new(1e-5, 0.1, 1.0, 170f64.to_radians(), env.clone()).is_err());
        assert!(NetworkConfig::new(1e-5, 0.1, 1.0, 0.0, env.clone()).is_err());
        assert!(NetworkConfig::new(-1.0, 0.1, 1.0, 1.0, env).is_err());
    }

    #[test]
    fn upsilon_zero_beamwidth() {
        let env = EnvironmentParams::synthetic();
        let quad = QuadratureSpec::default();
        assert_eq!(upsilon_mu(0.0, &env, &quad).unwrap(), 0.0);
        assert_eq!(upsilon_sigma(0.0, &env, &quad).unwrap(), 0.0);
    }

    #[test]
    fn upsilon_mu_degenerate_closed_form() {
        let quad = QuadratureSpec::default();
        // mu = 0: Υ_μ = -ln cos(φ_A/2) = ln 2 at φ_A = 2π/3
        let got = upsilon_mu(2.0 * PI / 3.0, &degenerate_env(0.0), &quad).unwrap();
        assert_relative_eq!(got, LN_2, max_relative = 1e-9);
        // general mu scales by 10^(-mu/10)
        let got = upsilon_mu(2.0 * PI / 3.0, &degenerate_env(7.0), &quad).unwrap();
        assert_relative_eq!(got, 10f64.powf(-0.7) * LN_2, max_relative = 1e-9);
    }

    #[test]
    fn upsilon_sigma_degenerate_closed_form() {
        let quad = QuadratureSpec::default();
        // mu = 0: Υ_σ = (1 - cos φ_A)/2 = 3/4 at φ_A = 2π/3
        let got = upsilon_sigma(2.0 * PI / 3.0, &degenerate_env(0.0), &quad).unwrap();
        assert_relative_eq!(got, 0.75, max_relative = 1e-9);
        let got = upsilon_sigma(2.0 * PI / 3.0, &degenerate_env(7.0), &quad).unwrap();
        assert_relative_eq!(got, 10f64.powf(-1.4) * 0.75, max_relative = 1e-9);
    }

    // Brute-force oracle: trapezoid rule on a uniform grid, independent of
    // the adaptive Gauss-Kronrod path.
    fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let dx = (b - a) / n as f64;
        let mut sum = 0.5 * (f(a) + f(b));
        for i in 1..n {
            sum += f(a + i as f64 * dx);
        }
        sum * dx
    }

    #[test]
    fn upsilon_matches_trapezoid_oracle() {
        let env = EnvironmentParams::synthetic();
        let quad = QuadratureSpec::default();
        let half = 60f64.to_radians();

        let mu_integrand = |phi: f64| {
            let p = los_probability_clamped(phi, &env);
            phi.tan()
                * (p * inverse_shadowing_mean(phi, LinkKind::Los, &env)
                    + (1.0 - p) * inverse_shadowing_mean(phi, LinkKind::Nlos, &env))
        };
        let sigma_integrand = |phi: f64| {
            let p = los_probability_clamped(phi, &env);
            (2.0 * phi).sin()
                * (p * inverse_shadowing_second_moment(phi, LinkKind::Los, &env)
                    + (1.0 - p) * inverse_shadowing_second_moment(phi, LinkKind::Nlos, &env))
        };

        let got_mu = upsilon_mu(2.0 * half, &env, &quad).unwrap();
        let got_sigma = upsilon_sigma(2.0 * half, &env, &quad).unwrap();
        assert_relative_eq!(got_mu, trapezoid(mu_integrand, 0.0, half, 1_000_000), max_relative = 1e-7);
        assert_relative_eq!(
            got_sigma,
            trapezoid(sigma_integrand, 0.0, half, 1_000_000),
            max_relative = 1e-7
        );
    }

    #[test]
    fn mean_zero_density() {
        let cfg = synthetic_net(0.0, 120f64.to_radians());
        assert_eq!(mean_aggregate_interference(&cfg).unwrap(), 0.0);
        assert_eq!(variance_aggregate_interference(&cfg, 500.0).unwrap(), 0.0);
        assert!(coefficient_of_variation(&cfg, 500.0).is_err());
    }

    #[test]
    fn mean_linear_in_density_and_power() {
        let beam = 120f64.to_radians();
        let base = mean_aggregate_interference(&synthetic_net(1e-5, beam)).unwrap();
        let double_lambda = mean_aggregate_interference(&synthetic_net(2e-5, beam)).unwrap();
        assert_eq!(double_lambda, 2.0 * base);

        let mut cfg = synthetic_net(1e-5, beam);
        cfg.p_interferer = 0.2;
        assert_eq!(mean_aggregate_interference(&cfg).unwrap(), 2.0 * base);
    }

    #[test]
    fn variance_quarter_at_double_altitude() {
        let cfg = synthetic_net(1e-5, 120f64.to_radians());
        let v1 = variance_aggregate_interference(&cfg, 500.0).unwrap();
        let v2 = variance_aggregate_interference(&cfg, 1000.0).unwrap();
        assert_eq!(v2, v1 / 4.0);
    }

    #[test]
    fn cv_scaling_laws_exact() {
        let beam = 120f64.to_radians();
        let cfg = synthetic_net(1e-5, beam);
        let cv = coefficient_of_variation(&cfg, 500.0).unwrap();
        assert_eq!(coefficient_of_variation(&cfg, 1000.0).unwrap(), cv / 2.0);
        let cfg4 = synthetic_net(4e-5, beam);
        assert_eq!(coefficient_of_variation(&cfg4, 500.0).unwrap(), cv / 2.0);
    }

    #[test]
    fn stats_bundle_is_consistent() {
        let cfg = synthetic_net(1e-5, 120f64.to_radians());
        let stats = interference_stats(&cfg, 500.0).unwrap();
        assert_eq!(stats.mean, mean_aggregate_interference(&cfg).unwrap());
        assert_eq!(
            stats.variance,
            variance_aggregate_interference(&cfg, 500.0).unwrap()
        );
        assert_eq!(stats.cv, stats.variance.sqrt() / stats.mean);
        assert!(stats.variance >= 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn upsilons_monotone_in_beamwidth(
            w1 in 0.0..MAX_BEAMWIDTH,
            w2 in 0.0..MAX_BEAMWIDTH,
        ) {
            let env = EnvironmentParams::synthetic();
            let quad = QuadratureSpec::default();
            let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            prop_assert!(upsilon_mu(lo, &env, &quad).unwrap() <= upsilon_mu(hi, &env, &quad).unwrap() + 1e-12);
            prop_assert!(upsilon_sigma(lo, &env, &quad).unwrap() <= upsilon_sigma(hi, &env, &quad).unwrap() + 1e-12);
        }
    }
}
