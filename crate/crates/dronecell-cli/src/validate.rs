//! Analytic-vs-oracle comparison: per sweep point, the closed forms are
//! checked against Monte Carlo estimates under the tolerances the engine's
//! modules declare (4 SE for means and variances, 95% binomial CI plus a
//! 0.05 absolute band for coverage).

use anyhow::{bail, Result};
use serde::Serialize;

use dronecell::interference::{mean_aggregate_interference, variance_aggregate_interference};
use dronecell::montecarlo::{simulate_coverage, simulate_distribution, CoverageMode, SimConfig};
use dronecell::performance::{
    coverage_probability, optimal_altitude, CoverageQuery, DEFAULT_ALTITUDE_BRACKET,
};

use crate::config::{derive_seed, ExperimentKind, ExperimentSpec};

/// One analytic-vs-simulation comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub analytic: f64,
    pub simulated: f64,
    pub standard_error: f64,
    pub tolerance: String,
    pub pass: bool,
}

/// The full validation result.
#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub kind: ExperimentKind,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Plain-text table, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "validation of {} at {} trials (seed {})\n",
            self.kind.as_str(),
            self.trials,
            self.seed
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {:<42} analytic={:<13.6e} simulated={:<13.6e} se={:.2e} ({})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.label,
                c.analytic,
                c.simulated,
                c.standard_error,
                c.tolerance
            ));
        }
        out.push_str(if self.passed() {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        });
        out
    }
}

// 95% Wilson score interval with continuity correction.
fn binomial_ci_95(p_hat: f64, n: f64) -> (f64, f64) {
    let z = 1.959_963_984_540_054f64;
    let q_hat = 1.0 - p_hat;
    let z2 = z * z;
    let denom = 2.0 * (n + z2);
    let lo = if p_hat == 0.0 {
        0.0
    } else {
        ((2.0 * n * p_hat + z2 - 1.0
            - z * (z2 - 2.0 - 1.0 / n + 4.0 * p_hat * (n * q_hat + 1.0)).sqrt())
            / denom)
            .max(0.0)
    };
    let hi = if p_hat == 1.0 {
        1.0
    } else {
        ((2.0 * n * p_hat + z2 + 1.0
            + z * (z2 + 2.0 - 1.0 / n + 4.0 * p_hat * (n * q_hat - 1.0)).sqrt())
            / denom)
            .min(1.0)
    };
    (lo, hi)
}

fn interference_checks(spec: &ExperimentSpec, checks: &mut Vec<Check>) -> Result<()> {
    for (index, &value) in spec.sweep.values.iter().enumerate() {
        let params = spec.fixed.with_axis(spec.sweep.axis, value);
        let net = params.network()?;
        let cfg = SimConfig::new(
            spec.trials,
            derive_seed(spec.seed, index as u64),
            params.h_m,
            net.clone(),
        )?;
        let dist = simulate_distribution(&cfg)?;
        let mean_analytic = mean_aggregate_interference(&net)?;
        let se_mean = dist.standard_error_of_mean;
        checks.push(Check {
            label: format!("mean at {}={value}", spec.sweep.axis.as_str()),
            analytic: mean_analytic,
            simulated: dist.mean,
            standard_error: se_mean,
            tolerance: "|Δ| <= 4 SE".to_string(),
            pass: (dist.mean - mean_analytic).abs() <= 4.0 * se_mean,
        });

        let var_analytic = variance_aggregate_interference(&net, params.h_m)?;
        let n = dist.samples.len() as f64;
        let m2 = dist.samples.iter().map(|x| (x - dist.mean).powi(2)).sum::<f64>() / n;
        let m4 = dist.samples.iter().map(|x| (x - dist.mean).powi(4)).sum::<f64>() / n;
        let se_var = ((m4 - m2 * m2).max(0.0) / n).sqrt();
        checks.push(Check {
            label: format!("variance at {}={value}", spec.sweep.axis.as_str()),
            analytic: var_analytic,
            simulated: dist.variance,
            standard_error: se_var,
            tolerance: "|Δ| <= 4 SE".to_string(),
            pass: (dist.variance - var_analytic).abs() <= 4.0 * se_var,
        });
    }
    Ok(())
}

fn coverage_checks(spec: &ExperimentSpec, checks: &mut Vec<Check>) -> Result<()> {
    for (index, &value) in spec.sweep.values.iter().enumerate() {
        let params = spec.fixed.with_axis(spec.sweep.axis, value);
        // fig6 validates at the rate-optimal altitude for each threshold
        let params = if spec.kind == ExperimentKind::Fig6 {
            let best = optimal_altitude(
                params.r_m,
                params.threshold_db,
                &params.network()?,
                DEFAULT_ALTITUDE_BRACKET.0,
                DEFAULT_ALTITUDE_BRACKET.1,
            )?;
            params.with_axis(crate::config::SweepAxis::HM, best.argmax)
        } else {
            params
        };
        let net = params.network()?;
        let query = CoverageQuery::new(params.r_m, params.h_m, params.threshold_db, net.clone())?;
        let analytic = coverage_probability(&query)?;
        let cfg = SimConfig::new(
            spec.trials,
            derive_seed(spec.seed, index as u64),
            params.h_m,
            net,
        )?;
        let n = spec.trials as f64;
        let se = (analytic * (1.0 - analytic) / n).sqrt();

        let mean_field = simulate_coverage(
            &cfg,
            params.r_m,
            params.threshold_linear(),
            CoverageMode::MeanField,
        )?;
        let (lo, hi) = binomial_ci_95(mean_field, n);
        checks.push(Check {
            label: format!("coverage (mean-field) at {}={value}", spec.sweep.axis.as_str()),
            analytic,
            simulated: mean_field,
            standard_error: se,
            tolerance: "analytic inside 95% binomial CI".to_string(),
            pass: (lo..=hi).contains(&analytic),
        });

        let actual = simulate_coverage(
            &cfg,
            params.r_m,
            params.threshold_linear(),
            CoverageMode::Actual,
        )?;
        checks.push(Check {
            label: format!("coverage (actual) at {}={value}", spec.sweep.axis.as_str()),
            analytic,
            simulated: actual,
            standard_error: se,
            tolerance: "|Δ| <= 0.05 absolute".to_string(),
            pass: (analytic - actual).abs() <= 0.05,
        });
    }
    Ok(())
}

/// Runs every check the experiment kind calls for.
pub fn validate_against_oracle(spec: &ExperimentSpec) -> Result<ValidationReport> {
    if spec.trials < 10_000 {
        bail!("validation needs trials >= 10000, got {}", spec.trials);
    }
    let mut checks = Vec::new();
    match spec.kind {
        ExperimentKind::Fig2
        | ExperimentKind::Fig3
        | ExperimentKind::Fig4
        | ExperimentKind::CustomSweep => interference_checks(spec, &mut checks)?,
        ExperimentKind::Fig5 | ExperimentKind::Fig6 => coverage_checks(spec, &mut checks)?,
    }
    Ok(ValidationReport {
        kind: spec.kind,
        trials: spec.trials,
        seed: spec.seed,
        checks,
    })
}
