//! Globally adaptive 1-D quadrature on an embedded Gauss(7)/Kronrod(15)
//! rule pair: the interval with the largest error estimate is bisected until
//! the summed estimate meets the tolerance.

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-15,
            max_subdivisions: 200,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    /// Integral estimate.
    pub value: f64,
    /// Summed |Kronrod - Gauss| error estimate.
    pub error_estimate: f64,
    /// Number of bisections performed.
    pub subdivisions: usize,
}

// Kronrod-15 abscissae (positive half; index 7 is the center).
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993945,
    0.5860872354676911,
    0.4058451513773972,
    0.20778495500789848,
    0.0,
];

// Kronrod-15 weights, matching XGK.
const WGK: [f64; 8] = [
    0.022935322010529224,
    0.06309209262997856,
    0.10479001032225019,
    0.14065325971552592,
    0.1690047266392679,
    0.19035057806478542,
    0.20443294007529889,
    0.20948214108472782,
];

// Gauss-7 weights for the odd-index abscissae plus the center.
const WG: [f64; 4] = [
    0.1294849661688697,
    0.27970539148927664,
    0.3818300505051189,
    0.4179591836734694,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f_lo = f(center - x);
        let f_hi = f(center + x);
        let pair = f_lo + f_hi;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }

    let value = kronrod * half;
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "integrand produced a non-finite value on [{a}, {b}]"
        )));
    }
    Ok(Segment {
        a,
        b,
        value,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[a, b]` to the requested tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if spec.rel_tol <= 0.0 || spec.abs_tol <= 0.0 {
        return Err(Error::Domain("quadrature tolerances must be > 0".into()));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }

    let mut segments = vec![gauss_kronrod(&f, a, b)?];
    let mut subdivisions = 0;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let residual: f64 = segments.iter().map(|s| s.error).sum();
        let tolerance = spec.abs_tol.max(spec.rel_tol * total.abs());
        if residual <= tolerance {
            return Ok(Quadrature {
                value: total,
                error_estimate: residual,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                residual,
                tolerance,
                subdivisions,
            });
        }

        // bisect the segment with the worst error estimate
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i)
            .expect("segment list is never empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(gauss_kronrod(&f, seg.a, mid)?);
        segments.push(gauss_kronrod(&f, mid, seg.b)?);
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn empty_interval_is_zero() {
        let q = integrate(|x| x, 2.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn polynomial_is_exact() {
        // degree-7 polynomial integrates exactly under Gauss-7
        let q = integrate(
            |x| 7.0 * x.powi(6) - 3.0 * x.powi(2) + 1.0,
            -1.0,
            2.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_relative_eq!(q.value, 129.0 - 9.0 + 3.0, max_relative = 1e-13);
    }

    #[test]
    fn tangent_antiderivative() {
        let q = integrate(|x| x.tan(), 0.0, PI / 3.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(q.value, 2f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn endpoint_algebraic_kink_converges() {
        // (c - x)^0.11 has an unbounded derivative at x = c, like the LoS
        // probability at the domain edge.
        let c = 5.0 * PI / 12.0;
        let q = integrate(|x| (c - x).max(0.0).powf(0.11), 0.0, c, &QuadratureSpec::default())
            .unwrap();
        let exact = c.powf(1.11) / 1.11;
        assert_relative_eq!(q.value, exact, max_relative = 1e-9);
    }

    #[test]
    fn subdivision_budget_is_enforced() {
        let spec = QuadratureSpec {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_subdivisions: 2,
        };
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 3.0, &spec).unwrap_err();
        match err {
            crate::Error::QuadratureNonConvergence { residual, .. } => {
                assert!(residual > 0.0)
            }
            other => panic!("expected non-convergence, got {other}"),
        }
    }

    #[test]
    fn rejects_invalid_bounds() {
        assert!(integrate(|x| x, 1.0, 0.0, &QuadratureSpec::default()).is_err());
        assert!(integrate(|x| x, f64::NAN, 1.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        assert!(integrate(|x| 1.0 / x, -1.0, 1.0, &QuadratureSpec::default()).is_err());
    }
}
