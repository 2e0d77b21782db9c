//! Closed-form link coverage probability, normalized transmission rate, and
//! one-dimensional optimizers over drone altitude and SIR threshold.

use crate::channel::{
    free_space_path_loss, geometry_from, los_probability, shadowing_sigma, LinkKind, ANGLE_DUST,
    MAX_PHI,
};
use crate::error::{Error, Result};
use crate::interference::{mean_aggregate_interference, NetworkConfig};
use crate::units::db_to_linear;

/// Default altitude search bracket in meters; wide enough to contain the
/// optima of every configuration exercised here, and overridable through
/// [`normalized_rate`] / [`optimal_altitude`].
pub const DEFAULT_ALTITUDE_BRACKET: (f64, f64) = (10.0, 4000.0);

const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// One coverage evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageQuery {
    /// UE ground distance from the drone nadir, m.
    pub r: f64,
    /// Drone altitude, m.
    pub h: f64,
    /// SIR threshold, dB.
    pub threshold_db: f64,
    /// Network parameters.
    pub net: NetworkConfig,
}

impl CoverageQuery {
    pub fn new(r: f64, h: f64, threshold_db: f64, net: NetworkConfig) -> Result<Self> {
        if !threshold_db.is_finite() {
            return Err(Error::Domain(format!(
                "threshold_db must be finite, got {threshold_db}"
            )));
        }
        let geom = geometry_from(r, h)?;
        if geom.phi > MAX_PHI * (1.0 + ANGLE_DUST) {
            return Err(Error::Domain(format!(
                "UE angle {:.6} rad exceeds the channel model limit 5π/12; \
                 raise h above r/tan(5π/12) ≈ {:.3} m",
                geom.phi,
                r / MAX_PHI.tan()
            )));
        }
        Ok(CoverageQuery {
            r,
            h,
            threshold_db,
            net,
        })
    }
}

/// Result of a 1-D maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Maximizing input (meters for altitude, dB for thresholds).
    pub argmax: f64,
    /// Objective value at `argmax`.
    pub value: f64,
    /// Every `(input, objective)` evaluation, in evaluation order.
    pub trace: Vec<(f64, f64)>,
    /// True when the argmax landed within one coarse grid step of either
    /// bracket end.
    pub at_boundary: bool,
}

/// Gaussian tail probability `Q(x) = P[N(0,1) > x]`, via the complementary
/// error function.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Link margin in dB: `10 log10(P_U / (μ_I L_f T))`.
///
/// Undefined when the mean interference is zero; the `lambda = 0` case is
/// handled by [`coverage_probability`]'s convention instead.
pub fn psi(query: &CoverageQuery) -> Result<f64> {
    let mean = mean_aggregate_interference(&query.net)?;
    if mean <= 0.0 {
        return Err(Error::Domain(
            "psi is undefined for zero mean interference (lambda = 0)".into(),
        ));
    }
    let geom = geometry_from(query.r, query.h)?;
    let path_loss = free_space_path_loss(&geom, query.net.env.frequency_hz);
    let threshold = db_to_linear(query.threshold_db);
    Ok(10.0 * (query.net.p_ue / (mean * path_loss * threshold)).log10())
}

// Tail probability of one link class. A zero spread degenerates the
// log-normal to a step: covered exactly when mu < psi.
fn class_term(mu: f64, sigma: f64, psi_db: f64) -> f64 {
    if sigma == 0.0 {
        if mu < psi_db {
            1.0
        } else {
            0.0
        }
    } else {
        q_function((mu - psi_db) / sigma)
    }
}

fn coverage_with_mean(query: &CoverageQuery, mean_interference: f64) -> Result<f64> {
    let geom = geometry_from(query.r, query.h)?;
    if geom.phi > MAX_PHI * (1.0 + ANGLE_DUST) {
        return Err(Error::Domain(format!(
            "UE angle {:.6} rad exceeds the channel model limit 5π/12",
            geom.phi
        )));
    }
    let phi = geom.phi.min(MAX_PHI);
    let path_loss = free_space_path_loss(&geom, query.net.env.frequency_hz);
    let threshold = db_to_linear(query.threshold_db);
    let psi_db = 10.0 * (query.net.p_ue / (mean_interference * path_loss * threshold)).log10();

    let p_los = los_probability(phi, &query.net.env)?;
    let env = &query.net.env;
    let los = class_term(env.mu_los, shadowing_sigma(phi, LinkKind::Los, env), psi_db);
    let nlos = class_term(env.mu_nlos, shadowing_sigma(phi, LinkKind::Nlos, env), psi_db);
    Ok((los * p_los + nlos * (1.0 - p_los)).clamp(0.0, 1.0))
}

/// Closed-form coverage probability `P[SIR > T]` with the aggregate
/// interference replaced by its mean:
/// `Q((μ_LoS - ψ)/σ_LoS) P_LoS + Q((μ_NLoS - ψ)/σ_NLoS) (1 - P_LoS)`.
///
/// With `lambda = 0` there is no interference, the SIR is unbounded and the
/// coverage is 1 by convention.
pub fn coverage_probability(query: &CoverageQuery) -> Result<f64> {
    if query.net.lambda == 0.0 {
        return Ok(1.0);
    }
    let mean = mean_aggregate_interference(&query.net)?;
    coverage_with_mean(query, mean)
}

// Golden-section maximization; assumes a unimodal-enough objective on [a, b]
// and records every evaluation. Ties resolve to the left.
fn golden_section_max<F>(
    objective: &F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    trace: &mut Vec<(f64, f64)>,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let eval = |x: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        let y = objective(x)?;
        trace.push((x, y));
        Ok(y)
    };
    let mut c = b - (b - a) * GOLDEN_RATIO_CONJUGATE;
    let mut d = a + (b - a) * GOLDEN_RATIO_CONJUGATE;
    let mut fc = eval(c, trace)?;
    let mut fd = eval(d, trace)?;
    while b - a > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * GOLDEN_RATIO_CONJUGATE;
            fc = eval(c, trace)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * GOLDEN_RATIO_CONJUGATE;
            fd = eval(d, trace)?;
        }
    }
    if fc >= fd {
        Ok((c, fc))
    } else {
        Ok((d, fd))
    }
}

// Coarse grid scan followed by golden-section refinement around the best
// grid point. Leftmost argmax wins all ties.
fn maximize_on_grid<F>(objective: F, grid: &[f64], xtol: f64) -> Result<OptimizationResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut trace = Vec::with_capacity(grid.len() + 64);
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let y = objective(x)?;
        trace.push((x, y));
        if y > best_val {
            best_val = y;
            best_idx = i;
        }
    }
    let mut argmax = grid[best_idx];
    let mut value = best_val;

    let lo = grid[best_idx.saturating_sub(1)];
    let hi = grid[(best_idx + 1).min(grid.len() - 1)];
    if hi - lo > xtol {
        let (refined, refined_val) = golden_section_max(&objective, lo, hi, xtol, &mut trace)?;
        if refined_val > value || (refined_val == value && refined < argmax) {
            argmax = refined;
            value = refined_val;
        }
    }

    let at_boundary = argmax <= grid[1.min(grid.len() - 1)]
        || argmax >= grid[grid.len().saturating_sub(2)];
    Ok(OptimizationResult {
        argmax,
        value,
        trace,
        at_boundary,
    })
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = hi / lo;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Finds the altitude maximizing the coverage probability on
/// `[h_min, h_max]`: a 64-point log-spaced scan refined by golden section to
/// 0.1 m.
///
/// The lower end is clipped to `r / tan(5π/12)` so every evaluated altitude
/// keeps the UE inside the channel model's angular domain; the clip shows up
/// as the first trace input.
pub fn optimal_altitude(
    r: f64,
    threshold_db: f64,
    net: &NetworkConfig,
    h_min: f64,
    h_max: f64,
) -> Result<OptimizationResult> {
    if !(h_min.is_finite() && h_max.is_finite()) || h_min <= 0.0 || h_min >= h_max {
        return Err(Error::Domain(format!(
            "altitude bracket must satisfy 0 < h_min < h_max, got [{h_min}, {h_max}]"
        )));
    }
    // keep phi strictly inside the model domain, with margin for rounding
    let h_floor = r / MAX_PHI.tan() * (1.0 + 1e-9);
    let lo = h_min.max(h_floor);
    if lo >= h_max {
        return Err(Error::Domain(format!(
            "infeasible bracket: r = {r} m requires h >= {h_floor:.3} m, above h_max = {h_max}"
        )));
    }

    let mean = if net.lambda == 0.0 {
        0.0
    } else {
        mean_aggregate_interference(net)?
    };
    let objective = |h: f64| -> Result<f64> {
        if net.lambda == 0.0 {
            return Ok(1.0);
        }
        let query = CoverageQuery {
            r,
            h,
            threshold_db,
            net: net.clone(),
        };
        coverage_with_mean(&query, mean)
    };
    maximize_on_grid(objective, &log_spaced(lo, h_max, 64), 0.1)
}

/// Normalized transmission rate `log2(1 + T) · max_h P_cov(T)` in bit/s/Hz,
/// with the altitude maximization restricted to `h_bracket`.
pub fn normalized_rate(
    threshold_db: f64,
    r: f64,
    net: &NetworkConfig,
    h_bracket: (f64, f64),
) -> Result<f64> {
    if !threshold_db.is_finite() {
        return Err(Error::Domain(format!(
            "threshold_db must be finite, got {threshold_db}"
        )));
    }
    let best = optimal_altitude(r, threshold_db, net, h_bracket.0, h_bracket.1)?;
    Ok((1.0 + db_to_linear(threshold_db)).log2() * best.value)
}

/// Finds the SIR threshold maximizing the normalized rate on
/// `[t_min_db, t_max_db]`: 0.25 dB grid scan refined by golden section to
/// 0.01 dB. Altitudes search over [`DEFAULT_ALTITUDE_BRACKET`].
pub fn optimal_threshold(
    r: f64,
    net: &NetworkConfig,
    t_min_db: f64,
    t_max_db: f64,
) -> Result<OptimizationResult> {
    if !(t_min_db.is_finite() && t_max_db.is_finite()) || t_min_db >= t_max_db {
        return Err(Error::Domain(format!(
            "threshold bracket must satisfy t_min < t_max, got [{t_min_db}, {t_max_db}]"
        )));
    }
    let mut grid = Vec::new();
    let mut t = t_min_db;
    while t < t_max_db {
        grid.push(t);
        t += 0.25;
    }
    grid.push(t_max_db);
    let objective =
        |t_db: f64| -> Result<f64> { normalized_rate(t_db, r, net, DEFAULT_ALTITUDE_BRACKET) };
    maximize_on_grid(objective, &grid, 0.01)
}
