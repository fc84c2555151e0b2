//! Complex path integration over piecewise contours.
//!
//! Open pieces (rays, arcs, lines) go through adaptive Gauss–Kronrod; closed
//! circles go through the doubling trapezoid rule. Rays towards infinity must
//! be cut at a finite radius first, see [`choose_truncation_radius`].

mod circle;
mod kronrod;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use circle::{integrate_circle_spectral, trapezoid_circle, INITIAL_POINTS};

/// Accuracy contract handed to every integration routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Panel budget per open segment.
    pub max_subdivisions: usize,
    /// Bound on the integrand mass discarded beyond a truncation radius.
    pub tail_tol: f64,
    pub max_circle_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            tail_tol: 1e-15,
            max_circle_points: 1 << 17,
        }
    }
}

impl QuadratureSpec {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if !in_unit(self.abs_tol) || !in_unit(self.rel_tol) || !in_unit(self.tail_tol) {
            return Err(Error::InvalidParams(format!(
                "tolerances must lie in (0, 1): {self:?}"
            )));
        }
        if self.max_subdivisions == 0 || self.max_circle_points < 2 * INITIAL_POINTS {
            return Err(Error::InvalidParams(format!(
                "point budgets too small: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub truncation_radius_used: Option<f64>,
    pub points_used: usize,
}

impl EvalResult {
    /// Multiplies value and error by a constant.
    pub fn scaled(self, factor: Complex64) -> Self {
        EvalResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.norm(),
            ..self
        }
    }
}

/// `e^{iθ}`, exact at multiples of π/2 so that contour pieces meeting on the
/// axes share bit-identical endpoints.
pub fn cis(theta: f64) -> Complex64 {
    let quarter = theta / FRAC_PI_2;
    let k = quarter.round();
    if (quarter - k).abs() < 1e-14 {
        return match (k as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::new(theta.cos(), theta.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RayDirection {
    /// Traversed from `r_start` to `r_end`.
    Outward,
    /// Traversed from `r_end` to `r_start`.
    Inward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PathSegment {
    Ray {
        angle: f64,
        r_start: f64,
        r_end: f64,
        direction: RayDirection,
    },
    Arc {
        center: Complex64,
        radius: f64,
        theta_start: f64,
        theta_end: f64,
    },
    Line {
        from: Complex64,
        to: Complex64,
    },
    Circle {
        center: Complex64,
        radius: f64,
        orientation: Orientation,
    },
}

impl PathSegment {
    pub fn ray(angle: f64, r_start: f64, r_end: f64, direction: RayDirection) -> Result<Self> {
        if !(r_start >= 0.0) || !r_start.is_finite() || !(r_start < r_end) {
            return Err(Error::InvalidContour(format!(
                "ray needs 0 <= r_start < r_end, got {r_start}..{r_end}"
            )));
        }
        Ok(PathSegment::Ray {
            angle,
            r_start,
            r_end,
            direction,
        })
    }

    pub fn arc(center: Complex64, radius: f64, theta_start: f64, theta_end: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidContour(format!("arc radius {radius}")));
        }
        Ok(PathSegment::Arc {
            center,
            radius,
            theta_start,
            theta_end,
        })
    }

    pub fn line(from: Complex64, to: Complex64) -> Self {
        PathSegment::Line { from, to }
    }

    pub fn circle(center: Complex64, radius: f64, orientation: Orientation) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidContour(format!("circle radius {radius}")));
        }
        Ok(PathSegment::Circle {
            center,
            radius,
            orientation,
        })
    }

    fn ray_point(angle: f64, r: f64) -> Option<Complex64> {
        r.is_finite().then(|| cis(angle) * r)
    }

    /// First point of the segment; `None` at infinity.
    pub fn start(&self) -> Option<Complex64> {
        match *self {
            PathSegment::Ray {
                angle,
                r_start,
                r_end,
                direction,
            } => match direction {
                RayDirection::Outward => Self::ray_point(angle, r_start),
                RayDirection::Inward => Self::ray_point(angle, r_end),
            },
            PathSegment::Arc {
                center,
                radius,
                theta_start,
                ..
            } => Some(center + cis(theta_start) * radius),
            PathSegment::Line { from, .. } => Some(from),
            PathSegment::Circle { center, radius, .. } => Some(center + radius),
        }
    }

    /// Last point of the segment; `None` at infinity.
    pub fn end(&self) -> Option<Complex64> {
        match *self {
            PathSegment::Ray {
                angle,
                r_start,
                r_end,
                direction,
            } => match direction {
                RayDirection::Outward => Self::ray_point(angle, r_end),
                RayDirection::Inward => Self::ray_point(angle, r_start),
            },
            PathSegment::Arc {
                center,
                radius,
                theta_end,
                ..
            } => Some(center + cis(theta_end) * radius),
            PathSegment::Line { to, .. } => Some(to),
            PathSegment::Circle { center, radius, .. } => Some(center + radius),
        }
    }

    /// The same geometry traversed backwards.
    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Ray {
                angle,
                r_start,
                r_end,
                direction,
            } => PathSegment::Ray {
                angle,
                r_start,
                r_end,
                direction: match direction {
                    RayDirection::Outward => RayDirection::Inward,
                    RayDirection::Inward => RayDirection::Outward,
                },
            },
            PathSegment::Arc {
                center,
                radius,
                theta_start,
                theta_end,
            } => PathSegment::Arc {
                center,
                radius,
                theta_start: theta_end,
                theta_end: theta_start,
            },
            PathSegment::Line { from, to } => PathSegment::Line { from: to, to: from },
            PathSegment::Circle {
                center,
                radius,
                orientation,
            } => PathSegment::Circle {
                center,
                radius,
                orientation: match orientation {
                    Orientation::Ccw => Orientation::Cw,
                    Orientation::Cw => Orientation::Ccw,
                },
            },
        }
    }

    fn has_infinite_end(&self) -> bool {
        matches!(self, PathSegment::Ray { r_end, .. } if !r_end.is_finite())
    }
}

/// Ordered, connected sequence of path segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contour {
    segments: Vec<PathSegment>,
    closed: bool,
}

impl Contour {
    /// Builds a contour, checking that consecutive endpoints coincide exactly
    /// and that infinite endpoints only occur at the two extremes.
    pub fn new(segments: Vec<PathSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidContour("no segments".into()));
        }
        for (i, pair) in segments.windows(2).enumerate() {
            match (pair[0].end(), pair[1].start()) {
                (Some(a), Some(b)) if a == b => {}
                (a, b) => {
                    return Err(Error::InvalidContour(format!(
                        "segments {i} and {} do not meet: {a:?} vs {b:?}",
                        i + 1
                    )))
                }
            }
        }
        let last = segments.len() - 1;
        for (i, s) in segments.iter().enumerate() {
            if s.has_infinite_end() {
                let ok = match s {
                    PathSegment::Ray { direction, .. } => match direction {
                        RayDirection::Inward => i == 0,
                        RayDirection::Outward => i == last,
                    },
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidContour(format!(
                        "segment {i} reaches infinity away from the contour ends"
                    )));
                }
            }
        }
        let closed = match (segments[0].start(), segments[last].end()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        Ok(Contour { segments, closed })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Option<Complex64> {
        self.segments[0].start()
    }

    pub fn end(&self) -> Option<Complex64> {
        self.segments[self.segments.len() - 1].end()
    }

    /// Whether any ray still reaches infinity.
    pub fn is_infinite(&self) -> bool {
        self.segments.iter().any(PathSegment::has_infinite_end)
    }

    /// Same contour traversed in the opposite direction.
    pub fn reversed(&self) -> Contour {
        Contour {
            segments: self.segments.iter().rev().map(PathSegment::reversed).collect(),
            closed: self.closed,
        }
    }
}

/// Integral of `integrand` over one finite segment.
pub fn integrate_segment<F>(
    integrand: &F,
    segment: &PathSegment,
    spec: &QuadratureSpec,
) -> Result<EvalResult>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    let finished = |value: Complex64, error: f64, points: usize| EvalResult {
        value,
        error_estimate: error,
        truncation_radius_used: None,
        points_used: points.max(1),
    };
    match *segment {
        PathSegment::Ray {
            angle,
            r_start,
            r_end,
            direction,
        } => {
            if !r_end.is_finite() {
                return Err(Error::InvalidContour(
                    "ray with an infinite endpoint must be truncated first".into(),
                ));
            }
            let dir = cis(angle);
            let g = |r: f64| integrand(dir * r) * dir;
            let res = kronrod::integrate_interval(&g, r_start, r_end, spec)?;
            let value = match direction {
                RayDirection::Outward => res.value,
                RayDirection::Inward => -res.value,
            };
            Ok(finished(value, res.error + spec.tail_tol, res.evaluations))
        }
        PathSegment::Arc {
            center,
            radius,
            theta_start,
            theta_end,
        } => {
            let g = |t: f64| {
                let offset = cis(t) * radius;
                integrand(center + offset) * Complex64::new(0.0, 1.0) * offset
            };
            let res = kronrod::integrate_interval(&g, theta_start, theta_end, spec)?;
            Ok(finished(res.value, res.error, res.evaluations))
        }
        PathSegment::Line { from, to } => {
            let delta = to - from;
            let g = |t: f64| integrand(from + delta * t) * delta;
            let res = kronrod::integrate_interval(&g, 0.0, 1.0, spec)?;
            Ok(finished(res.value, res.error, res.evaluations))
        }
        PathSegment::Circle {
            center,
            radius,
            orientation,
        } => {
            let res = integrate_circle_spectral(integrand, center, radius, spec)?;
            Ok(match orientation {
                Orientation::Ccw => res,
                Orientation::Cw => res.scaled(Complex64::new(-1.0, 0.0)),
            })
        }
    }
}

/// Integral of `integrand` along `contour`, summed segment by segment in
/// contour order. The error estimate is the sum of the per-segment
/// estimates, with `tail_tol` added for each ray.
pub fn integrate_path<F>(integrand: &F, contour: &Contour, spec: &QuadratureSpec) -> Result<EvalResult>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    if contour.is_infinite() {
        return Err(Error::InvalidContour(
            "contour still has an infinite endpoint".into(),
        ));
    }
    let mut total = EvalResult {
        value: Complex64::new(0.0, 0.0),
        error_estimate: 0.0,
        truncation_radius_used: None,
        points_used: 0,
    };
    for segment in contour.segments() {
        let r = integrate_segment(integrand, segment, spec)?;
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.points_used += r.points_used;
    }
    Ok(total)
}

/// Real integral `∫_a^b f(x) dx` through the same adaptive rule.
pub fn integrate_real<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<EvalResult>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let g = |x: f64| Complex64::new(f(x), 0.0);
    let res = kronrod::integrate_interval(&g, a, b, spec)?;
    Ok(EvalResult {
        value: res.value,
        error_estimate: res.error,
        truncation_radius_used: None,
        points_used: res.evaluations.max(1),
    })
}

/// Radius beyond which an integrand bounded by
/// `exp(-c·r^m + Σ coeff_i·r^{deg_i})` can be dropped.
///
/// The returned `R` satisfies `c·r^m − Σ coeff_i·r^{deg_i} ≥ (c/2)·r^m` for
/// all `r ≥ R` and `exp(−(c/2)·R^m)·(1 + R) < tail_tol`. It is found by
/// doubling from 1 and then tightened by bisection.
pub fn choose_truncation_radius(
    decay_degree: u32,
    decay_coeff: f64,
    growth_terms: &[(u32, f64)],
    tail_tol: f64,
) -> Result<f64> {
    if let Some(max_growth) = growth_terms
        .iter()
        .filter(|(_, c)| *c > 0.0)
        .map(|(d, _)| *d)
        .max()
    {
        if max_growth >= decay_degree {
            return Err(Error::DegenerateExponent {
                decay: decay_degree,
                growth: max_growth,
            });
        }
    }
    if decay_degree == 0 || !(decay_coeff > 0.0) {
        return Err(Error::DegenerateExponent {
            decay: decay_degree,
            growth: 0,
        });
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParams(format!("tail_tol = {tail_tol}")));
    }

    let m = decay_degree as i32;
    let half = 0.5 * decay_coeff;
    let ok = |r: f64| {
        let rm = r.powi(m);
        let growth: f64 = growth_terms
            .iter()
            .map(|&(d, c)| c * r.powi(d as i32))
            .sum();
        let dominated = decay_coeff * rm - growth >= half * rm;
        let small_tail = (-half * rm).exp() * (1.0 + r) < tail_tol;
        dominated && small_tail
    };

    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParams(
                "no truncation radius below 1e12".into(),
            ));
        }
    }
    let mut lo = if hi > 1.0 { 0.5 * hi } else { 0.0 };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_over_unit_line() {
        let contour = Contour::new(vec![PathSegment::line(c(0.0, 0.0), c(1.0, 0.0))]).unwrap();
        let r = integrate_path(&|_w: Complex64| c(1.0, 0.0), &contour, &QuadratureSpec::default())
            .unwrap();
        assert!((r.value - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.points_used >= 1);
    }

    #[test]
    fn reciprocal_over_unit_circle() {
        let circle = PathSegment::circle(c(0.0, 0.0), 1.0, Orientation::Ccw).unwrap();
        let contour = Contour::new(vec![circle]).unwrap();
        assert!(contour.is_closed());
        let r = integrate_path(&|w: Complex64| w.inv(), &contour, &QuadratureSpec::default()).unwrap();
        assert!((r.value - c(0.0, 2.0 * PI)).norm() < 1e-14);
        assert!((r.value.im - 6.283185307).abs() < 1e-9);
    }

    #[test]
    fn gaussian_on_truncated_ray() {
        let spec = QuadratureSpec {
            tail_tol: 1e-14,
            ..QuadratureSpec::default()
        };
        let r_trunc = choose_truncation_radius(2, 1.0, &[], spec.tail_tol).unwrap();
        let contour = Contour::new(vec![
            PathSegment::ray(0.0, 0.0, r_trunc, RayDirection::Outward).unwrap(),
        ])
        .unwrap();
        let r = integrate_path(&|w: Complex64| (-w * w).exp(), &contour, &spec).unwrap();
        assert!((r.value.re - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((r.value.re - 0.8862269255).abs() < 1e-10);
    }

    #[test]
    fn infinite_contours_are_rejected() {
        let contour = Contour::new(vec![
            PathSegment::ray(0.0, 0.0, f64::INFINITY, RayDirection::Outward).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            integrate_path(&|w: Complex64| (-w).exp(), &contour, &QuadratureSpec::default()),
            Err(Error::InvalidContour(_))
        ));
    }

    #[test]
    fn infinite_endpoint_must_be_at_contour_end() {
        let segs = vec![
            PathSegment::ray(0.0, 0.0, f64::INFINITY, RayDirection::Outward).unwrap(),
            PathSegment::ray(1.0, 0.0, 1.0, RayDirection::Outward).unwrap(),
        ];
        assert!(Contour::new(segs).is_err());
    }

    #[test]
    fn segment_invariants() {
        assert!(PathSegment::ray(0.0, 2.0, 1.0, RayDirection::Outward).is_err());
        assert!(PathSegment::arc(c(0.0, 0.0), 0.0, 0.0, 1.0).is_err());
        assert!(PathSegment::circle(c(0.0, 0.0), -1.0, Orientation::Ccw).is_err());
        assert!(PathSegment::ray(0.0, 0.0, f64::INFINITY, RayDirection::Inward).is_ok());
    }

    #[test]
    fn disconnected_pieces_are_rejected() {
        let segs = vec![
            PathSegment::line(c(0.0, 0.0), c(1.0, 0.0)),
            PathSegment::line(c(1.0, 1e-12), c(2.0, 0.0)),
        ];
        assert!(matches!(Contour::new(segs), Err(Error::InvalidContour(_))));
    }

    #[test]
    fn cis_is_exact_on_axes() {
        assert_eq!(cis(PI), c(-1.0, 0.0));
        assert_eq!(cis(2.0 * PI), c(1.0, 0.0));
        assert_eq!(cis(-PI / 2.0), c(0.0, -1.0));
        assert!((cis(0.3) - c(0.3f64.cos(), 0.3f64.sin())).norm() == 0.0);
    }

    fn tail_ok(m: i32, cf: f64, growth: &[(u32, f64)], r: f64, tol: f64) -> bool {
        let rm = r.powi(m);
        let g: f64 = growth.iter().map(|&(d, k)| k * r.powi(d as i32)).sum();
        cf * rm - g >= 0.5 * cf * rm && (-0.5 * cf * rm).exp() * (1.0 + r) < tol
    }

    #[test]
    fn truncation_cubic_decay() {
        let r = choose_truncation_radius(3, 1.0 / 3.0, &[(1, 0.0)], 1e-12).unwrap();
        assert!((-r.powi(3) / 6.0).exp() * (1.0 + r) < 1e-12);
        // bisection leaves R essentially minimal
        assert!(!tail_ok(3, 1.0 / 3.0, &[], r * 0.999, 1e-12));
        // root of R^3/6 = ln(1e12) + ln(1+R)
        assert!((r - 5.615_973_189_342_68).abs() < 1e-9, "R = {r}");
    }

    #[test]
    fn truncation_gaussian_decay() {
        let r = choose_truncation_radius(2, 0.5, &[], 1e-10).unwrap();
        assert!((-r * r / 4.0).exp() * (1.0 + r) < 1e-10);
        assert!(r >= 7.3);
        assert!((r - 10.085_936_395_506_5).abs() < 1e-9, "R = {r}");
    }

    #[test]
    fn truncation_with_growth() {
        let growth = [(1, 8.0), (2, 0.25)];
        let r = choose_truncation_radius(3, 1.0 / 3.0, &growth, 1e-14).unwrap();
        for k in 0..50 {
            let rr = r * (1.0 + 0.2 * k as f64);
            assert!(tail_ok(3, 1.0 / 3.0, &growth, rr, 1e-14));
        }
    }

    #[test]
    fn truncation_degenerate_exponent() {
        assert_eq!(
            choose_truncation_radius(2, 0.5, &[(2, 1.0)], 1e-10),
            Err(Error::DegenerateExponent { decay: 2, growth: 2 })
        );
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        assert!(QuadratureSpec::with_abs_tol(0.0).validate().is_err());
        assert!(QuadratureSpec::with_abs_tol(2.0).validate().is_err());
    }
}
