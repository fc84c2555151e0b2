//! Equally spaced trapezoidal rule on circles. For integrands analytic in an
//! annulus around the circle the rule converges geometrically, so successive
//! point doublings give a usable error indicator.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{cis, EvalResult, QuadratureSpec};
use crate::error::{Error, Result};

/// Number of points in the first trapezoid pass.
pub const INITIAL_POINTS: usize = 32;

fn node_term<F>(f: &F, center: Complex64, radius: f64, theta: f64) -> (Complex64, f64)
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    let offset = cis(theta) * radius;
    // dw = i (w - c) dθ
    let v = f(center + offset) * Complex64::new(0.0, 1.0) * offset;
    (v, v.norm())
}

/// Trapezoidal approximation of `∮ f(w) dw` (counter-clockwise) with exactly
/// `points` equally spaced nodes, the first at angle 0.
pub fn trapezoid_circle<F>(f: &F, center: Complex64, radius: f64, points: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    let h = 2.0 * PI / points as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..points {
        sum += node_term(f, center, radius, j as f64 * h).0;
    }
    sum * h
}

/// Counter-clockwise `∮_{|w-c|=r} f(w) dw` by point doubling from
/// [`INITIAL_POINTS`] until two successive passes differ by less than
/// `max(abs_tol, rel_tol·|value|)` (floored at the roundoff level of the sum).
pub fn integrate_circle_spectral<F>(
    f: &F,
    center: Complex64,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<EvalResult>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidContour(format!(
            "circle radius must be positive and finite, got {radius}"
        )));
    }

    let mut points = INITIAL_POINTS;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for j in 0..points {
        let (v, a) = node_term(f, center, radius, 2.0 * PI * j as f64 / points as f64);
        sum += v;
        l1 += a;
    }
    let mut previous = sum * (2.0 * PI / points as f64);

    while 2 * points <= spec.max_circle_points {
        let next_points = 2 * points;
        let h = 2.0 * PI / next_points as f64;
        for j in 0..points {
            let (v, a) = node_term(f, center, radius, (2 * j + 1) as f64 * h);
            sum += v;
            l1 += a;
        }
        points = next_points;
        let value = sum * h;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonConvergence(
                "non-finite integrand on circle".to_string(),
            ));
        }
        let diff = (value - previous).norm();
        let target = spec
            .abs_tol
            .max(spec.rel_tol * value.norm())
            .max(64.0 * f64::EPSILON * l1 * h);
        if diff < target {
            return Ok(EvalResult {
                value,
                error_estimate: diff,
                truncation_radius_used: None,
                points_used: points,
            });
        }
        previous = value;
    }

    Err(Error::NonConvergence(format!(
        "circle rule exceeded {} points (radius {radius})",
        spec.max_circle_points
    )))
}
