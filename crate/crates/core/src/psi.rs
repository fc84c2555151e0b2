//! The ψ family
//!
//! ```text
//! ψ(z) = 1/(2πi) ∮ w^{k−2} exp{z/w − σ·w^{−(n−k+1)} − η·w^{k−1}} dw,
//! σ = 1/(n−k+1),  η = 1/(k−1),
//! ```
//!
//! solving `f^{(n)} − z·f^{(k)} − f = 0`, together with the special
//! solutions `U = ψ(4,3)`, `G = 2πi·ψ(3,2)` and the contour integral `H`
//! tied to `U` by `2πi·U(z) = H(z) + H(−z)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::contours::{standard_contour, ContourKind};
use crate::error::{Error, Result};
use crate::quadrature::{
    choose_truncation_radius, integrate_circle_spectral, integrate_path, integrate_real,
    EvalResult, QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiParams {
    n: usize,
    k: usize,
}

impl PsiParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if !(1 < k && k < n) {
            return Err(Error::InvalidParams(format!(
                "psi family needs 1 < k < n, got n = {n}, k = {k}"
            )));
        }
        Ok(PsiParams { n, k })
    }

    /// `(n, k) = (4, 3)`, the parameters of `U`.
    pub fn u() -> Self {
        PsiParams { n: 4, k: 3 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sigma(&self) -> f64 {
        1.0 / (self.n - self.k + 1) as f64
    }

    pub fn eta(&self) -> f64 {
        1.0 / (self.k - 1) as f64
    }

    /// Integrand of the `s`-th derivative, without the `1/(2πi)`.
    pub fn integrand(&self, s: usize, z: Complex64) -> impl Fn(Complex64) -> Complex64 + '_ {
        let power = self.k as i32 - 2 - s as i32;
        let q = (self.n - self.k + 1) as i32;
        let p = self.k as i32 - 1;
        move |w| {
            let inv = w.inv();
            let e = z * inv - self.sigma() * inv.powi(q) - self.eta() * w.powi(p);
            w.powi(power) * e.exp()
        }
    }

    /// Default circle radius `max(1, |z|^{1/k})`.
    pub fn default_radius(&self, z: Complex64) -> f64 {
        z.norm().powf(1.0 / self.k as f64).max(1.0)
    }
}

const INV_TWO_PI_I: Complex64 = Complex64::new(0.0, -1.0 / (2.0 * PI));

/// `ψ^{(s)}(z)` on the default circle.
pub fn psi_eval(params: &PsiParams, s: usize, z: Complex64, spec: &QuadratureSpec) -> Result<EvalResult> {
    psi_eval_on_radius(params, s, z, params.default_radius(z), spec)
}

/// `ψ^{(s)}(z)` on the circle `|w| = radius`; any positive radius gives the
/// same value.
pub fn psi_eval_on_radius(
    params: &PsiParams,
    s: usize,
    z: Complex64,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<EvalResult> {
    let f = params.integrand(s, z);
    Ok(integrate_circle_spectral(&f, Complex64::new(0.0, 0.0), radius, spec)?.scaled(INV_TWO_PI_I))
}

/// `|ψ^{(n)}(z) − z·ψ^{(k)}(z) − ψ(z)|`.
pub fn ode_residual_psi(params: &PsiParams, z: Complex64, spec: &QuadratureSpec) -> Result<f64> {
    let f0 = psi_eval(params, 0, z, spec)?.value;
    let fk = psi_eval(params, params.k, z, spec)?.value;
    let fnn = psi_eval(params, params.n, z, spec)?.value;
    Ok((fnn - z * fk - f0).norm())
}

/// Named special solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpecialFunction {
    U,
    H,
    /// `H(−z)`, evaluated directly over the mirrored contour.
    HNeg,
    G { radius: f64 },
}

impl fmt::Display for SpecialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialFunction::U => write!(f, "U"),
            SpecialFunction::H => write!(f, "H"),
            SpecialFunction::HNeg => write!(f, "H_neg"),
            SpecialFunction::G { radius } => write!(f, "G(R={radius})"),
        }
    }
}

impl FromStr for SpecialFunction {
    type Err = Error;

    /// Accepts `U`, `H`, `H_neg` (or `Hneg`), `G` (radius 1) and `G(R)`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "U" => Ok(SpecialFunction::U),
            "H" => Ok(SpecialFunction::H),
            "H_neg" | "Hneg" => Ok(SpecialFunction::HNeg),
            "G" => Ok(SpecialFunction::G { radius: 1.0 }),
            other => {
                let radius = other
                    .strip_prefix("G(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.trim().trim_start_matches("R=").parse::<f64>().ok())
                    .filter(|r| *r > 0.0 && r.is_finite());
                radius
                    .map(|radius| SpecialFunction::G { radius })
                    .ok_or_else(|| Error::UnknownName(other.to_string()))
            }
        }
    }
}

// w^{1−p} exp{z/w − 1/(2w²) − w²/2}
fn h_integrand(p: usize, z: Complex64) -> impl Fn(Complex64) -> Complex64 {
    let power = 1 - p as i32;
    move |w| {
        let inv = w.inv();
        w.powi(power) * (z * inv - 0.5 * inv * inv - 0.5 * w * w).exp()
    }
}

fn h_on(kind: ContourKind, p: usize, z: Complex64, spec: &QuadratureSpec) -> Result<EvalResult> {
    // |exp(z/w)| ≤ e^{|z|} and |w^{1−p}| ≤ r on the rays, both dominated by e^{(|z|+1) r}
    let t = choose_truncation_radius(2, 0.5, &[(1, z.norm() + 1.0)], spec.tail_tol)?.max(2.0);
    let path = standard_contour(kind, t)?;
    let mut r = integrate_path(&h_integrand(p, z), &path, spec)?;
    r.truncation_radius_used = Some(t);
    Ok(r)
}

/// Value (or `p`-th derivative) of a special solution.
pub fn special_eval(name: SpecialFunction, p: usize, z: Complex64, spec: &QuadratureSpec) -> Result<EvalResult> {
    match name {
        SpecialFunction::U => psi_eval(&PsiParams::u(), p, z, spec),
        SpecialFunction::H => h_on(ContourKind::A, p, z, spec),
        SpecialFunction::HNeg => h_on(ContourKind::P, p, z, spec),
        SpecialFunction::G { radius } => {
            let power = -(p as i32);
            let f = move |w: Complex64| {
                let inv = w.inv();
                inv.powi(-power) * (z * inv - 0.5 * inv * inv - w).exp()
            };
            integrate_circle_spectral(&f, Complex64::new(0.0, 0.0), radius, spec)
        }
    }
}

/// `H′(0) = −∫₀^π sinθ·e^{−cos 2θ} dθ − 2∫₁^∞ exp{−1/(2r²) − r²/2} dr`.
pub fn h_prime_zero(spec: &QuadratureSpec) -> Result<f64> {
    Ok(h_prime_zero_terms(spec)?.iter().sum())
}

/// The two terms of [`h_prime_zero`] separately (arc, rays).
pub fn h_prime_zero_terms(spec: &QuadratureSpec) -> Result<[f64; 2]> {
    let arc = integrate_real(&|t: f64| t.sin() * (-(2.0 * t).cos()).exp(), 0.0, PI, spec)?;
    let t = choose_truncation_radius(2, 0.5, &[], spec.tail_tol)?.max(2.0);
    let rays = integrate_real(&|r: f64| (-0.5 / (r * r) - 0.5 * r * r).exp(), 1.0, t, spec)?;
    Ok([-arc.value.re, -2.0 * rays.value.re])
}

/// `|2πi·U(z) − H(z) − H(−z)|`.
pub fn identity_residual(z: Complex64, spec: &QuadratureSpec) -> Result<f64> {
    let u = special_eval(SpecialFunction::U, 0, z, spec)?.value;
    let h = special_eval(SpecialFunction::H, 0, z, spec)?.value;
    let h_neg = special_eval(SpecialFunction::HNeg, 0, z, spec)?.value;
    Ok((Complex64::new(0.0, 2.0 * PI) * u - h - h_neg).norm())
}

/// Numerical certificate that `Re ψ^{(k−1)}(0) > 0`, hence that `ψ` is not
/// identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiExistenceCert {
    pub k: usize,
    pub n: usize,
    /// `max_θ |Q(θ)|`.
    pub q_bound: f64,
    /// `(1/2π)∫_{−π}^{π} e^{P(θ)} cos Q(θ) dθ`.
    pub re_value: f64,
}

const CERT_GRID: usize = 20_000;

pub fn psi_existence_check(params: &PsiParams, spec: &QuadratureSpec) -> Result<PsiExistenceCert> {
    let q = (params.n - params.k + 1) as f64;
    let p = (params.k - 1) as f64;
    let (sigma, eta) = (params.sigma(), params.eta());
    let big_p = move |t: f64| -sigma * (q * t).cos() - eta * (p * t).cos();
    let big_q = move |t: f64| sigma * (q * t).sin() - eta * (p * t).sin();

    let q_bound = (0..=CERT_GRID)
        .map(|i| big_q(-PI + 2.0 * PI * i as f64 / CERT_GRID as f64).abs())
        .fold(0.0, f64::max);
    let re = integrate_real(&|t: f64| big_p(t).exp() * big_q(t).cos(), -PI, PI, spec)?;
    let re_value = re.value.re / (2.0 * PI);

    if !(q_bound < FRAC_PI_2) {
        return Err(Error::CertFailure(format!("max |Q| = {q_bound} >= pi/2")));
    }
    if !(re_value > 0.0) {
        return Err(Error::CertFailure(format!("Re psi^(k-1)(0) = {re_value}")));
    }
    Ok(PsiExistenceCert {
        k: params.k,
        n: params.n,
        q_bound,
        re_value,
    })
}
