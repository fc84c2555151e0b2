//! Property checks over point grids, with machine-readable reports, plus the
//! growth and decay estimators built on top of the evaluators.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::contours::decay_sector_bounds;
use crate::error::{Error, Result};
use crate::phi::{
    ode_residual_phi, phi_eval, phi_eval_on, phi_wronskian_zero, PhiContour, PhiParams,
};
use crate::psi::{
    h_prime_zero, identity_residual, ode_residual_psi, psi_eval, psi_eval_on_radius,
    psi_existence_check, special_eval, PsiParams, SpecialFunction,
};
use crate::quadrature::QuadratureSpec;
use crate::series::{
    least_squares, psi_deriv_zero_exact, recurrence_extend, u_coeff, u_coeff_exact, u_series,
    ln_abs_rational, rational_to_f64, SeriesFamily,
};

/// Parameters a property is run with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyParams {
    Phi(PhiParams),
    Psi(PsiParams),
    /// Order `n` of the `b = 0` subfamily.
    Order(usize),
    /// The property concerns fixed functions (`U`, `H`, `G`).
    Fixed,
}

/// Where a property is sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// The property's own default grid.
    Default,
    Points(Vec<Complex64>),
    /// `count` points spread over the closed disk `|z| ≤ radius`.
    Disk { radius: f64, count: usize },
    /// Equally spaced points of `[from, to]` on the real axis.
    Real { from: f64, to: f64, count: usize },
    /// Equally spaced points `i·y`, `y ∈ [from, to]`.
    Imag { from: f64, to: f64, count: usize },
}

impl GridSpec {
    fn resolve(&self, default: &GridSpec) -> Result<Vec<Complex64>> {
        let pts = match self {
            GridSpec::Default => return default.resolve(&GridSpec::Points(Vec::new())),
            GridSpec::Points(p) => p.clone(),
            GridSpec::Disk { radius, count } => disk_points(*radius, *count),
            GridSpec::Real { from, to, count } => linspace(*from, *to, *count)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect(),
            GridSpec::Imag { from, to, count } => linspace(*from, *to, *count)
                .into_iter()
                .map(|y| Complex64::new(0.0, y))
                .collect(),
        };
        if pts.is_empty() {
            return Err(Error::InvalidParams("empty grid".into()));
        }
        Ok(pts)
    }
}

pub fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count)
            .map(|i| from + (to - from) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Sunflower arrangement: deterministic and roughly uniform in area.
pub fn disk_points(radius: f64, count: usize) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|j| {
            let r = radius * ((j as f64 + 0.5) / count as f64).sqrt();
            Complex64::from_polar(r, j as f64 * golden)
        })
        .collect()
}

/// One evaluated sample of a property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub label: String,
    pub z: [f64; 2],
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property_id: String,
    pub family: String,
    pub params: PropertyParams,
    pub grid: Vec<[f64; 2]>,
    pub residuals: Vec<Residual>,
    pub max_violation: f64,
    pub threshold: f64,
    pub passed: bool,
}

struct Property {
    id: &'static str,
    family: &'static str,
    summary: &'static str,
}

const PROPERTIES: &[Property] = &[
    Property { id: "phi_ode", family: "phi", summary: "phi solves its equation; residual/(1+|z|)" },
    Property { id: "psi_ode", family: "psi", summary: "psi solves its equation; residual/(1+|z|)" },
    Property { id: "phi_real", family: "phi", summary: "|Im phi(x)| on the real axis for real b" },
    Property { id: "psi_real", family: "psi", summary: "|Im psi| on the real axis (and the imaginary axis for n even, k odd)" },
    Property { id: "psi_even", family: "psi", summary: "|psi(z) - psi(-z)| for n even, k odd" },
    Property { id: "psi_radius_invariance", family: "psi", summary: "psi on radii 1, |z|^(1/k), 2|z|^(1/k)" },
    Property { id: "psi_existence", family: "psi", summary: "Re psi^(k-1)(0) > 0 with max|Q| < pi/2" },
    Property { id: "identity_UH", family: "special", summary: "|2 pi i U - H(z) - H(-z)| / (1+|H|)" },
    Property { id: "wronskian_nonzero", family: "phi", summary: "1/|W(f_j...)(0)| for every n-subset; 1/|U(0) H'(0)|" },
    Property { id: "U_imag_axis_negative", family: "U", summary: "Re U(iy) + |Im U(iy)| must be negative" },
    Property { id: "U_imag_symmetry", family: "U", summary: "||U(iy)| - |U(-iy)|| / |U(iy)|" },
    Property { id: "U_growth_direction", family: "U", summary: "distance of argmax_theta |U(r e^(i theta))| from +-pi/2" },
    Property { id: "G_radius_invariance", family: "special", summary: "|G_1(z) - G_2(z)|" },
    Property { id: "G_psi_consistency", family: "special", summary: "|2 pi i psi_(3,2)(z) - G(z)|" },
    Property { id: "phi_contour_invariance", family: "phi", summary: "|phi_C(z) - phi_J(z)| inside the decay sector" },
    Property { id: "phi_decay", family: "phi", summary: "0.1 - k_hat along each sample direction (negative slope required)" },
    Property { id: "series_quadrature", family: "psi", summary: "60-term recurrence series vs quadrature for |z| <= 1" },
    Property { id: "triple_agreement_U", family: "U", summary: "closed form vs residue sum vs recurrence, nu <= 30" },
    Property { id: "coeff_bounds_U", family: "U", summary: "log-distance of |a_2nu| outside the Stirling sandwich, 20 <= nu <= 200" },
];

/// Registered property ids with one-line descriptions.
pub fn registered_properties() -> Vec<(&'static str, &'static str)> {
    PROPERTIES.iter().map(|p| (p.id, p.summary)).collect()
}

fn lookup(id: &str) -> Result<&'static Property> {
    PROPERTIES
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::UnknownProperty(id.to_string()))
}

/// Parameters used when the caller passes none.
pub fn default_params(id: &str) -> Result<PropertyParams> {
    let p = lookup(id)?;
    let c = Complex64::new;
    Ok(match p.id {
        "phi_ode" => PropertyParams::Phi(PhiParams::new(3, 1, c(1.0, 0.0))?),
        "phi_real" | "phi_decay" => PropertyParams::Phi(PhiParams::u(2)?),
        "phi_contour_invariance" => PropertyParams::Phi(PhiParams::new(3, 1, c(0.5, 0.0))?),
        "psi_radius_invariance" => PropertyParams::Psi(PsiParams::new(5, 3)?),
        "psi_ode" | "psi_real" | "psi_even" | "psi_existence" | "series_quadrature" => {
            PropertyParams::Psi(PsiParams::u())
        }
        _ => PropertyParams::Fixed,
    })
}

fn default_grid(id: &str) -> GridSpec {
    match id {
        "phi_real" | "psi_real" => GridSpec::Real { from: -3.0, to: 3.0, count: 13 },
        "identity_UH" => GridSpec::Disk { radius: 2.0, count: 20 },
        "G_radius_invariance" | "G_psi_consistency" => GridSpec::Disk { radius: 2.0, count: 5 },
        "psi_radius_invariance" => GridSpec::Disk { radius: 3.0, count: 10 },
        "U_imag_axis_negative" => GridSpec::Imag { from: 0.0, to: 10.0, count: 101 },
        "U_imag_symmetry" => GridSpec::Imag { from: 0.5, to: 10.0, count: 20 },
        // circle radii on the positive real axis
        "U_growth_direction" => GridSpec::Points(vec![4.0, 6.0, 8.0].into_iter().map(|r| Complex64::new(r, 0.0)).collect()),
        // one point per direction, modulus ignored
        "phi_decay" => GridSpec::Points(
            [0.0, 0.3, -0.3, 0.9, -0.9].iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
        ),
        "phi_contour_invariance" => GridSpec::Points(
            [(2.5, 0.0), (3.0, 0.6), (4.0, -0.7), (5.0, 0.2), (3.5, -0.2)]
                .iter()
                .map(|&(r, t)| Complex64::from_polar(r, t))
                .collect(),
        ),
        "series_quadrature" => GridSpec::Disk { radius: 1.0, count: 10 },
        "wronskian_nonzero" | "psi_existence" | "triple_agreement_U" | "coeff_bounds_U" => {
            GridSpec::Points(vec![Complex64::new(0.0, 0.0)])
        }
        _ => GridSpec::Disk { radius: 2.0, count: 10 },
    }
}

fn pt(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn at(z: Complex64, violation: f64) -> Residual {
    Residual {
        label: String::new(),
        z: pt(z),
        violation,
    }
}

fn tagged(label: impl Into<String>, violation: f64) -> Residual {
    Residual {
        label: label.into(),
        z: [0.0, 0.0],
        violation,
    }
}

fn want_phi(params: PropertyParams) -> Result<PhiParams> {
    match params {
        PropertyParams::Phi(p) => Ok(p),
        other => Err(Error::InvalidParams(format!("expected phi parameters, got {other:?}"))),
    }
}

fn want_psi(params: PropertyParams) -> Result<PsiParams> {
    match params {
        PropertyParams::Psi(p) => Ok(p),
        other => Err(Error::InvalidParams(format!("expected psi parameters, got {other:?}"))),
    }
}

fn even_odd(p: &PsiParams) -> bool {
    p.n() % 2 == 0 && p.k() % 2 == 1
}

/// Evaluates property `property_id` at every grid point and compares the
/// largest violation with the property's threshold. `params = None` selects
/// the property's default parameters.
pub fn run_property(
    property_id: &str,
    params: Option<PropertyParams>,
    grid_spec: &GridSpec,
    spec: &QuadratureSpec,
) -> Result<PropertyReport> {
    let prop = lookup(property_id)?;
    let params = match params {
        Some(p) => p,
        None => default_params(prop.id)?,
    };
    let grid = grid_spec.resolve(&default_grid(prop.id))?;
    let tol = spec.abs_tol;
    let c0 = Complex64::new(0.0, 0.0);
    let i2pi = Complex64::new(0.0, 2.0 * PI);

    let (residuals, threshold): (Vec<Residual>, f64) = match prop.id {
        "phi_ode" => {
            let p = want_phi(params)?;
            let r = grid
                .iter()
                .map(|&z| Ok(at(z, ode_residual_phi(&p, z, spec)? / (1.0 + z.norm()))))
                .collect::<Result<_>>()?;
            (r, 1e-6)
        }
        "psi_ode" => {
            let p = want_psi(params)?;
            let r = grid
                .iter()
                .map(|&z| Ok(at(z, ode_residual_psi(&p, z, spec)? / (1.0 + z.norm()))))
                .collect::<Result<_>>()?;
            (r, 1e-6)
        }
        "phi_real" => {
            let p = want_phi(params)?;
            if p.b().im != 0.0 {
                return Err(Error::InvalidParams("phi_real needs a real b".into()));
            }
            let r = grid
                .iter()
                .map(|&z| {
                    let x = Complex64::new(z.re, 0.0);
                    Ok(at(x, phi_eval(&p, 0, x, spec)?.value.im.abs() / (1.0 + x.norm())))
                })
                .collect::<Result<_>>()?;
            (r, 100.0 * tol)
        }
        "psi_real" => {
            let p = want_psi(params)?;
            let mut r = Vec::new();
            for &z in &grid {
                let x = Complex64::new(z.re, 0.0);
                r.push(at(x, psi_eval(&p, 0, x, spec)?.value.im.abs() / (1.0 + x.norm())));
                if even_odd(&p) {
                    let iy = Complex64::new(0.0, z.re);
                    r.push(at(iy, psi_eval(&p, 0, iy, spec)?.value.im.abs() / (1.0 + iy.norm())));
                }
            }
            (r, 100.0 * tol)
        }
        "psi_even" => {
            let p = want_psi(params)?;
            if !even_odd(&p) {
                return Err(Error::InvalidParams("psi_even needs n even and k odd".into()));
            }
            let r = grid
                .iter()
                .map(|&z| {
                    let d = psi_eval(&p, 0, z, spec)?.value - psi_eval(&p, 0, -z, spec)?.value;
                    Ok(at(z, d.norm() / (1.0 + z.norm())))
                })
                .collect::<Result<_>>()?;
            (r, 100.0 * tol)
        }
        "psi_radius_invariance" => {
            let p = want_psi(params)?;
            let r = grid
                .iter()
                .map(|&z| {
                    let base = z.norm().powf(1.0 / p.k() as f64);
                    let mut vals = Vec::new();
                    for radius in [1.0, base, 2.0 * base] {
                        if radius > 0.0 {
                            vals.push(psi_eval_on_radius(&p, 0, z, radius, spec)?.value);
                        }
                    }
                    let scale = 1.0 + vals[0].norm();
                    let spread = vals
                        .iter()
                        .map(|v| (v - vals[0]).norm())
                        .fold(0.0, f64::max);
                    Ok(at(z, spread / scale))
                })
                .collect::<Result<_>>()?;
            (r, 1e-10)
        }
        "psi_existence" => {
            let p = want_psi(params)?;
            let cert = psi_existence_check(&p, spec)?;
            (
                vec![
                    tagged("q_bound - pi/2", cert.q_bound - FRAC_PI_2),
                    tagged("-re_value", -cert.re_value),
                ],
                0.0,
            )
        }
        "identity_UH" => {
            let r = grid
                .iter()
                .map(|&z| {
                    let h = special_eval(SpecialFunction::H, 0, z, spec)?.value;
                    Ok(at(z, identity_residual(z, spec)? / (1.0 + h.norm())))
                })
                .collect::<Result<_>>()?;
            (r, 1e-7)
        }
        "wronskian_nonzero" => {
            let orders: Vec<usize> = match params {
                PropertyParams::Order(n) => vec![n],
                PropertyParams::Phi(p) => vec![p.n()],
                _ => vec![2, 3, 4],
            };
            let mut r = Vec::new();
            for n in orders {
                for omit in (1..=n + 1).rev() {
                    let js: Vec<usize> = (1..=n + 1).filter(|&j| j != omit).collect();
                    let w = phi_wronskian_zero(n, &js)?;
                    r.push(tagged(format!("n={n} j={js:?}"), 1.0 / w.norm()));
                }
            }
            let u0 = special_eval(SpecialFunction::U, 0, c0, spec)?.value.re;
            let hp = h_prime_zero(spec)?;
            r.push(tagged("U(0)H'(0)", 1.0 / (u0 * hp).abs()));
            (r, 1e6)
        }
        "U_imag_axis_negative" => {
            let r = grid
                .iter()
                .map(|&z| {
                    let iy = Complex64::new(0.0, z.im.abs().max(z.re.abs()));
                    let v = special_eval(SpecialFunction::U, 0, iy, spec)?.value;
                    Ok(at(iy, v.re + v.im.abs()))
                })
                .collect::<Result<_>>()?;
            (r, -100.0 * tol)
        }
        "U_imag_symmetry" => {
            let r = grid
                .iter()
                .map(|&z| {
                    let a = special_eval(SpecialFunction::U, 0, z, spec)?.value.norm();
                    let b = special_eval(SpecialFunction::U, 0, -z, spec)?.value.norm();
                    Ok(at(z, (a - b).abs() / a.max(f64::MIN_POSITIVE)))
                })
                .collect::<Result<_>>()?;
            (r, 1e-10)
        }
        "U_growth_direction" => {
            let samples = 256;
            let step = 2.0 * PI / samples as f64;
            let r = grid
                .iter()
                .map(|&z| {
                    let radius = z.norm();
                    let u = |w: Complex64| Ok(special_eval(SpecialFunction::U, 0, w, spec)?.value);
                    let (_, theta) = max_modulus(&u, radius, samples)?;
                    let dist = (theta.abs() - FRAC_PI_2).abs();
                    Ok(Residual {
                        label: format!("r={radius}"),
                        z: pt(Complex64::from_polar(radius, theta)),
                        violation: dist,
                    })
                })
                .collect::<Result<_>>()?;
            (r, step)
        }
        "G_radius_invariance" => {
            let r = grid
                .iter()
                .map(|&z| {
                    let a = special_eval(SpecialFunction::G { radius: 1.0 }, 0, z, spec)?.value;
                    let b = special_eval(SpecialFunction::G { radius: 2.0 }, 0, z, spec)?.value;
                    Ok(at(z, (a - b).norm()))
                })
                .collect::<Result<_>>()?;
            (r, 1e-9)
        }
        "G_psi_consistency" => {
            let p = PsiParams::new(3, 2)?;
            let r = grid
                .iter()
                .map(|&z| {
                    let psi = psi_eval(&p, 0, z, spec)?.value;
                    let g = special_eval(SpecialFunction::G { radius: 1.0 }, 0, z, spec)?.value;
                    Ok(at(z, (i2pi * psi - g).norm()))
                })
                .collect::<Result<_>>()?;
            (r, 1e-8)
        }
        "phi_contour_invariance" => {
            let p = want_phi(params)?;
            let r = grid
                .iter()
                .map(|&z| {
                    let a = phi_eval_on(&p, 0, z, PhiContour::C, spec)?.value;
                    let b = phi_eval_on(&p, 0, z, PhiContour::J, spec)?.value;
                    Ok(at(z, (a - b).norm()))
                })
                .collect::<Result<_>>()?;
            (r, 1e-10)
        }
        "phi_decay" => {
            let p = want_phi(params)?;
            let radii: Vec<f64> = (2..=8).map(f64::from).collect();
            let r = grid
                .iter()
                .map(|&z| {
                    let theta = z.arg();
                    let (sign, k_hat) = decay_fit(&p, theta, &radii, spec)?;
                    Ok(Residual {
                        label: format!("theta={theta}"),
                        z: pt(z),
                        violation: 0.1 - k_hat * f64::from(-sign),
                    })
                })
                .collect::<Result<_>>()?;
            (r, 0.0)
        }
        "series_quadrature" => {
            const M: usize = 60;
            let (family, n, eval): (SeriesFamily, usize, Box<dyn Fn(usize, Complex64) -> Result<Complex64>>) =
                match params {
                    PropertyParams::Psi(p) => (
                        SeriesFamily::Psi(p),
                        p.n(),
                        Box::new(move |s, z| Ok(psi_eval(&p, s, z, spec)?.value)),
                    ),
                    PropertyParams::Phi(p) => (
                        SeriesFamily::Phi(p),
                        p.n(),
                        Box::new(move |s, z| Ok(phi_eval(&p, s, z, spec)?.value)),
                    ),
                    other => {
                        return Err(Error::InvalidParams(format!(
                            "series_quadrature needs phi or psi parameters, got {other:?}"
                        )))
                    }
                };
            let seed = (0..n).map(|s| eval(s, c0)).collect::<Result<Vec<_>>>()?;
            let series = recurrence_extend(family, &seed, M)?;
            let r = grid
                .iter()
                .map(|&z| Ok(at(z, (series.eval(z, M) - eval(0, z)?).norm())))
                .collect::<Result<_>>()?;
            (r, 1e-8)
        }
        "triple_agreement_U" => (triple_agreement_u(30, 1e-18)?, 1e-10),
        "coeff_bounds_U" => (
            (20..=200)
                .map(|nu| {
                    let (lo, hi) = stirling_log_bounds(nu);
                    let la = ln_abs_rational(&u_coeff_exact(nu, 1e-16));
                    tagged(format!("nu={nu}"), (la - hi).max(lo - la))
                })
                .collect(),
            0.0,
        ),
        other => return Err(Error::UnknownProperty(other.to_string())),
    };

    let max_violation = residuals
        .iter()
        .map(|r| r.violation)
        .fold(f64::NEG_INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    Ok(PropertyReport {
        property_id: prop.id.to_string(),
        family: prop.family.to_string(),
        params,
        grid: grid.iter().map(|&z| pt(z)).collect(),
        residuals,
        max_violation,
        threshold,
        passed: max_violation <= threshold,
    })
}

/// Every registered property with default parameters and grid.
pub fn run_all(spec: &QuadratureSpec) -> Result<Vec<PropertyReport>> {
    PROPERTIES
        .iter()
        .map(|p| run_property(p.id, None, &GridSpec::Default, spec))
        .collect()
}

/// `(ln lower, ln upper)` for `(1/5)(e/2ν)^{3ν} ≤ |a_{2ν}| ≤ (e/2ν)^{3ν}`.
pub fn stirling_log_bounds(nu: usize) -> (f64, f64) {
    let hi = 3.0 * nu as f64 * (std::f64::consts::E / (2.0 * nu as f64)).ln();
    (hi - 5f64.ln(), hi)
}

/// Pairwise differences between the three routes to `a_{2ν}`, `ν ≤ max_nu`:
/// closed form, residue sum divided by `(2ν)!`, and the recurrence seeded
/// with `ψ(0), …, ψ'''(0)` from residue sums.
pub fn triple_agreement_u(max_nu: usize, trunc_tol: f64) -> Result<Vec<Residual>> {
    let u = PsiParams::u();
    let closed = u_series(max_nu, trunc_tol);
    let seed: Vec<Complex64> = (0..u.n())
        .map(|s| Complex64::new(rational_to_f64(&psi_deriv_zero_exact(&u, s, trunc_tol)), 0.0))
        .collect();
    let rec = recurrence_extend(SeriesFamily::Psi(u), &seed, 2 * max_nu)?;
    let mut fact = num_rational::BigRational::from_integer(1.into());
    let mut out = Vec::new();
    for m in 0..=2 * max_nu {
        if m > 0 {
            fact *= num_bigint::BigInt::from(m);
        }
        if m % 2 == 1 {
            continue;
        }
        let residue = rational_to_f64(&(psi_deriv_zero_exact(&u, m, trunc_tol) / fact.clone()));
        let a = closed.coeffs[m].re;
        let r = rec.coeffs[m].re;
        let d = (a - residue).abs().max((a - r).abs()).max((residue - r).abs());
        out.push(tagged(format!("nu={}", m / 2), d));
    }
    Ok(out)
}

/// `(M(r), argmax θ)` over `theta_samples` equally spaced directions
/// `θ_j = −π + 2πj/N`.
pub fn max_modulus<F>(evaluator: &F, radius: f64, theta_samples: usize) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..theta_samples {
        let theta = -PI + 2.0 * PI * j as f64 / theta_samples as f64;
        let v = evaluator(Complex64::from_polar(radius, theta))?.norm();
        if !v.is_finite() {
            return Err(Error::NonConvergence(format!("|f| = {v} at r = {radius}, theta = {theta}")));
        }
        if v > best.0 {
            best = (v, theta);
        }
    }
    Ok(best)
}

fn fit_growth_sse(radii: &[f64], log_m: &[f64], d: f64, with_log: bool) -> Option<f64> {
    let rows: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| {
            if with_log {
                vec![r.powf(d), r.ln(), 1.0]
            } else {
                vec![r.powf(d), 1.0]
            }
        })
        .collect();
    let x = least_squares(&rows, log_m)?;
    Some(
        rows.iter()
            .zip(log_m)
            .map(|(row, y)| {
                let fit: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                (fit - y).powi(2)
            })
            .sum(),
    )
}

/// Order of growth `d` in `log M(r) ≈ c·r^d + a·log r + b`.
///
/// `M(r)` is the maximum of `|f|` over the θ-grid. The exponent is found by
/// scanning `d ∈ [0.05, 3]` and solving the remaining linear coefficients by
/// least squares; the `log r` term is dropped when only three radii are
/// given. A plain log-log slope of `log M` is badly biased at moderate radii
/// by the constant and power-law factors, which this model absorbs.
pub fn estimate_order_max_modulus<F>(evaluator: &F, radii: &[f64], theta_samples: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    if radii.len() < 3 {
        return Err(Error::InvalidParams(format!("need at least 3 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
        return Err(Error::InvalidParams("radii must be positive and increasing".into()));
    }
    if theta_samples < 64 {
        return Err(Error::InvalidParams(format!("theta_samples = {theta_samples} < 64")));
    }
    let mut log_m = Vec::with_capacity(radii.len());
    for &r in radii {
        let (m, _) = max_modulus(evaluator, r, theta_samples)?;
        if !(m > 0.0) {
            return Err(Error::NonPositiveModulus(r));
        }
        log_m.push(m.ln());
    }
    Ok(growth_exponent(radii, &log_m))
}

/// Best-fitting `d` for `log_m ≈ c·r^d + (a·log r) + b`.
pub fn growth_exponent(radii: &[f64], log_m: &[f64]) -> f64 {
    let with_log = radii.len() > 3;
    let sse = |d: f64| fit_growth_sse(radii, log_m, d, with_log).unwrap_or(f64::INFINITY);
    let (mut best_d, mut best) = (0.05, f64::INFINITY);
    let mut d = 0.05;
    while d <= 3.0 {
        let s = sse(d);
        if s < best {
            best = s;
            best_d = d;
        }
        d += 1e-3;
    }
    // golden-section refinement inside the bracketing cell
    let (mut a, mut b) = (best_d - 1e-3, best_d + 1e-3);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..40 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if sse(x1) < sse(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    0.5 * (a + b)
}

/// Fits `log|φ(r e^{iθ})| ≈ a + s·r^{1+1/n}` and returns `(sign s, |s|)`.
/// The absolute tolerance is ignored so that tiny values keep their
/// relative accuracy.
pub fn decay_fit(params: &PhiParams, theta: f64, radii: &[f64], spec: &QuadratureSpec) -> Result<(i8, f64)> {
    let (_, hi) = decay_sector_bounds(params.n());
    if !(theta.abs() < hi) {
        return Err(Error::OutOfSector { theta, bound: hi });
    }
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParams("need at least two increasing radii".into()));
    }
    let e = 1.0 + 1.0 / params.n() as f64;
    // log|φ| needs relative accuracy on values far below abs_tol
    let spec = &QuadratureSpec {
        abs_tol: 1e-300,
        ..*spec
    };
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for &r in radii {
        let v = phi_eval(params, 0, Complex64::from_polar(r, theta), spec)?.value.norm();
        if !(v > 0.0) {
            return Err(Error::NonPositiveModulus(r));
        }
        rows.push(vec![r.powf(e), 1.0]);
        y.push(v.ln());
    }
    let fit = least_squares(&rows, &y)
        .ok_or_else(|| Error::InvalidParams("degenerate decay fit".into()))?;
    let s = fit[0];
    let sign = if s < 0.0 { -1 } else if s > 0.0 { 1 } else { 0 };
    Ok((sign, s.abs()))
}

/// `a_{2ν}` for `ν ≤ max_nu` as floats (underflowing ones are 0).
pub fn u_coefficients(max_nu: usize, trunc_tol: f64) -> Vec<f64> {
    (0..=max_nu).map(|nu| u_coeff(nu, trunc_tol)).collect()
}
