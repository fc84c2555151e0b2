//! Named integration contours.
//!
//! * `C(n)`: in from infinity along `arg w = −π/(n+1)`, out along `+π/(n+1)`.
//! * `Cj(n, j)`: `C(n)` rotated by `2π(j−1)/(n+1)`.
//! * `J(θ, n, |z|)`: in along `arg w = μ` to radius `R`, arc from `μ` to `τ`,
//!   out along `arg w = τ`, with `μ = −π/(n+1) − θ/n`, `τ = π/(n+1) − θ/n`
//!   and `R = B·|z|^{1/n}`. On this contour the integrand of φ decays along
//!   both rays for `arg z = θ` in the decay sector.
//! * `A`: in along the positive real axis to 1, upper unit semicircle, out
//!   along the negative real axis.
//! * `P`: the image of `A` under `w ↦ −w`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{Contour, PathSegment, RayDirection};

/// Fraction of the admissible supremum of `B` that is actually used.
pub const B_FRACTION: f64 = 0.9;

/// Open sector `(−nπ/(2n+2), nπ/(2n+2))` of `arg z` in which φ decays.
pub fn decay_sector_bounds(n: usize) -> (f64, f64) {
    let half = n as f64 * PI / (2.0 * n as f64 + 2.0);
    (-half, half)
}

/// Geometry of the deformed contour `J` for a given direction `θ` of `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JContourSpec {
    theta: f64,
    n: usize,
    radius: f64,
    b: f64,
}

impl JContourSpec {
    pub fn new(theta: f64, n: usize, z_abs: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n = {n} < 2")));
        }
        let (_, hi) = decay_sector_bounds(n);
        if !(theta.abs() < hi) {
            return Err(Error::OutOfSector { theta, bound: hi });
        }
        if !(z_abs > 0.0) || !z_abs.is_finite() {
            return Err(Error::InvalidParams(format!("|z| = {z_abs}")));
        }
        let mut spec = JContourSpec {
            theta,
            n,
            radius: 0.0,
            b: 0.0,
        };
        spec.b = B_FRACTION * ((n as f64 + 1.0) * spec.a_const()).powf(1.0 / n as f64);
        spec.radius = spec.b * z_abs.powf(1.0 / n as f64);
        Ok(spec)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        -PI / (self.n as f64 + 1.0) - self.theta / self.n as f64
    }

    pub fn tau(&self) -> f64 {
        PI / (self.n as f64 + 1.0) - self.theta / self.n as f64
    }

    /// `A = min{cos(μ+θ), cos(τ+θ)}`.
    pub fn a_const(&self) -> f64 {
        (self.mu() + self.theta)
            .cos()
            .min((self.tau() + self.theta).cos())
    }

    pub fn b_const(&self) -> f64 {
        self.b
    }

    /// Arc radius `R = B·|z|^{1/n}`.
    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ContourKind {
    C { n: usize },
    Cj { n: usize, j: usize },
    J { theta: f64, n: usize, z_abs: f64 },
    A,
    P,
}

fn two_ray(angle_in: f64, angle_out: f64, inner: f64, outer: f64) -> Result<Contour> {
    Contour::new(vec![
        PathSegment::ray(angle_in, inner, outer, RayDirection::Inward)?,
        PathSegment::ray(angle_out, inner, outer, RayDirection::Outward)?,
    ])
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} < 2")));
    }
    Ok(())
}

/// Builds the named contour with every infinite endpoint replaced by
/// `truncation` (pass `f64::INFINITY` for the idealised geometry).
pub fn standard_contour(kind: ContourKind, truncation: f64) -> Result<Contour> {
    if !(truncation > 0.0) {
        return Err(Error::InvalidParams(format!("truncation = {truncation}")));
    }
    match kind {
        ContourKind::C { n } => {
            check_n(n)?;
            let a = PI / (n as f64 + 1.0);
            two_ray(-a, a, 0.0, truncation)
        }
        ContourKind::Cj { n, j } => {
            check_n(n)?;
            if j == 0 || j > n + 1 {
                return Err(Error::BadIndex { index: j, max: n + 1 });
            }
            let step = 2.0 * PI * (j as f64 - 1.0) / (n as f64 + 1.0);
            let a = PI / (n as f64 + 1.0);
            two_ray(-a + step, a + step, 0.0, truncation)
        }
        ContourKind::J { theta, n, z_abs } => {
            let geom = JContourSpec::new(theta, n, z_abs)?;
            j_contour(&geom, truncation)
        }
        ContourKind::A => three_piece(0.0, PI, truncation),
        ContourKind::P => three_piece(PI, 2.0 * PI, truncation),
    }
}

/// `J` for an already validated geometry.
pub fn j_contour(geom: &JContourSpec, truncation: f64) -> Result<Contour> {
    let r = geom.radius();
    if !(truncation > r) {
        return Err(Error::InvalidParams(format!(
            "truncation {truncation} must exceed the arc radius {r}"
        )));
    }
    Contour::new(vec![
        PathSegment::ray(geom.mu(), r, truncation, RayDirection::Inward)?,
        PathSegment::arc(Complex64::new(0.0, 0.0), r, geom.mu(), geom.tau())?,
        PathSegment::ray(geom.tau(), r, truncation, RayDirection::Outward)?,
    ])
}

// in along `from`, unit semicircle from `from` to `to`, out along `to`
fn three_piece(from: f64, to: f64, truncation: f64) -> Result<Contour> {
    if !(truncation > 1.0) {
        return Err(Error::InvalidParams(format!(
            "truncation {truncation} must exceed 1"
        )));
    }
    Contour::new(vec![
        PathSegment::ray(from, 1.0, truncation, RayDirection::Inward)?,
        PathSegment::arc(Complex64::new(0.0, 0.0), 1.0, from, to)?,
        PathSegment::ray(to, 1.0, truncation, RayDirection::Outward)?,
    ])
}
