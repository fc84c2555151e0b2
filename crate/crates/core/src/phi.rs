//! The φ family
//!
//! ```text
//! φ(z) = 1/(2πi) ∫_C exp{−wz + bα·w^{k+1} + β·w^{n+1}} dw,
//! α = (−1)^{k+1}/(k+1),  β = 1/(n+1),
//! ```
//!
//! which solves `f^{(n)} + (−1)^{n+1}·b·f^{(k)} + (−1)^{n+1}·z·f = 0`.
//! With `b = 0` this is `u`, and with `n = 2` it is the Airy integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::contours::{decay_sector_bounds, j_contour, standard_contour, ContourKind, JContourSpec};
use crate::error::{Error, Result};
use crate::quadrature::{
    choose_truncation_radius, cis, integrate_path, integrate_real, EvalResult, QuadratureSpec,
};
use crate::series::u_deriv_zero;

/// Below this modulus the plain contour `C` is always used.
pub const J_SWITCH_RADIUS: f64 = 2.0;
/// Minimum angular distance of `arg z` from the sector edge for `J`.
pub const J_SECTOR_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiParams {
    n: usize,
    k: usize,
    b: Complex64,
}

impl PhiParams {
    pub fn new(n: usize, k: usize, b: Complex64) -> Result<Self> {
        if n < 2 || k == 0 || k >= n {
            return Err(Error::InvalidParams(format!(
                "phi family needs n >= 2 and 0 < k < n, got n = {n}, k = {k}"
            )));
        }
        if !b.re.is_finite() || !b.im.is_finite() {
            return Err(Error::InvalidParams(format!("b = {b}")));
        }
        Ok(PhiParams { n, k, b })
    }

    /// `u` for order `n`, i.e. `b = 0` (the value of `k` is irrelevant then).
    pub fn u(n: usize) -> Result<Self> {
        Self::new(n, 1, Complex64::new(0.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        let sign = if (self.k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / (self.k as f64 + 1.0)
    }

    pub fn beta(&self) -> f64 {
        1.0 / (self.n as f64 + 1.0)
    }

    pub fn gamma(&self) -> f64 {
        (self.k as f64 + 1.0) * PI / (self.n as f64 + 1.0)
    }

    /// `arg b`; undefined for `b = 0`.
    pub fn lambda(&self) -> Option<f64> {
        (self.b != Complex64::new(0.0, 0.0)).then(|| self.b.arg())
    }

    fn exponent(&self, w: Complex64, z: Complex64) -> Complex64 {
        -w * z
            + self.b * self.alpha() * w.powu(self.k as u32 + 1)
            + self.beta() * w.powu(self.n as u32 + 1)
    }

    /// Integrand of the `p`-th derivative: `(−w)^p·exp{…}`.
    pub fn integrand(&self, p: usize, z: Complex64) -> impl Fn(Complex64) -> Complex64 + '_ {
        move |w| (-w).powu(p as u32) * self.exponent(w, z).exp()
    }
}

/// The `n+1` roots of unity `β_j = exp{2πi(j−1)/(n+1)}`, `j = 1..=n+1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootsOfUnity {
    n: usize,
    betas: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(n: usize) -> Self {
        let betas = (0..=n)
            .map(|j| cis(2.0 * PI * j as f64 / (n as f64 + 1.0)))
            .collect();
        RootsOfUnity { n, betas }
    }

    pub fn get(&self, j: usize) -> Result<Complex64> {
        if j == 0 || j > self.n + 1 {
            return Err(Error::BadIndex {
                index: j,
                max: self.n + 1,
            });
        }
        Ok(self.betas[j - 1])
    }

    pub fn all(&self) -> &[Complex64] {
        &self.betas
    }
}

/// Which contour [`phi_eval_on`] integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiContour {
    /// `J(arg z)` for large `z` well inside the decay sector, `C` otherwise.
    Auto,
    C,
    J,
}

fn uses_j(n: usize, z: Complex64) -> bool {
    let (_, hi) = decay_sector_bounds(n);
    z.norm() >= J_SWITCH_RADIUS && z.arg().abs() <= hi - J_SECTOR_MARGIN
}

fn c_truncation(params: &PhiParams, p: usize, z: Complex64, tail_tol: f64) -> Result<f64> {
    choose_truncation_radius(
        params.n as u32 + 1,
        params.beta(),
        &[
            (1, z.norm() + p as f64),
            (params.k as u32 + 1, (params.b * params.alpha()).norm()),
        ],
        tail_tol,
    )
}

const INV_TWO_PI_I: Complex64 = Complex64::new(0.0, -1.0 / (2.0 * PI));

/// `φ^{(p)}(z)`, choosing the contour automatically.
pub fn phi_eval(params: &PhiParams, p: usize, z: Complex64, spec: &QuadratureSpec) -> Result<EvalResult> {
    phi_eval_on(params, p, z, PhiContour::Auto, spec)
}

pub fn phi_eval_on(
    params: &PhiParams,
    p: usize,
    z: Complex64,
    contour: PhiContour,
    spec: &QuadratureSpec,
) -> Result<EvalResult> {
    let integrand = params.integrand(p, z);
    let use_j = match contour {
        PhiContour::Auto => uses_j(params.n, z),
        PhiContour::C => false,
        PhiContour::J => true,
    };
    let (path, truncation) = if use_j {
        let geom = JContourSpec::new(z.arg(), params.n, z.norm())?;
        let m = params.n as f64 + 1.0;
        let decay = params.beta() * (m * geom.mu()).cos().abs().min((m * geom.tau()).cos().abs());
        let t = choose_truncation_radius(
            params.n as u32 + 1,
            decay,
            &[
                (1, p as f64),
                (params.k as u32 + 1, (params.b * params.alpha()).norm()),
            ],
            spec.tail_tol,
        )?
        .max(geom.radius() + 1.0);
        (j_contour(&geom, t)?, t)
    } else {
        let t = c_truncation(params, p, z, spec.tail_tol)?;
        (standard_contour(ContourKind::C { n: params.n }, t)?, t)
    };
    let mut r = integrate_path(&integrand, &path, spec)?.scaled(INV_TWO_PI_I);
    r.truncation_radius_used = Some(truncation);
    Ok(r)
}

/// `Re φ^{(p)}(0)` from the two real half-line integrals with weights
/// `e₁(r)`, `e₂(r)`; independent of the complex contour route.
pub fn phi_deriv_zero_re(params: &PhiParams, p: usize, spec: &QuadratureSpec) -> Result<f64> {
    let alpha = params.alpha();
    let gamma = params.gamma();
    let bmod = params.b.norm();
    // for b = 0 λ is irrelevant; every λ-dependent term carries |b|
    let lambda = params.lambda().unwrap_or(0.0);
    let phase = (p as f64 + 1.0) * PI / (params.n as f64 + 1.0);
    let kp1 = params.k as i32 + 1;
    let np1 = params.n as i32 + 1;
    let beta = params.beta();
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };

    let integrand = |r: f64| {
        let x = bmod * alpha * r.powi(kp1);
        let decay = beta * r.powi(np1);
        let e1 = (x * (gamma - lambda).cos() - decay).exp();
        let e2 = (x * (gamma + lambda).cos() - decay).exp();
        r.powi(p as i32)
            * (e1 * (x * (gamma - lambda).sin() + phase).sin()
                + e2 * (x * (gamma + lambda).sin() + phase).sin())
    };
    let t = choose_truncation_radius(
        params.n as u32 + 1,
        beta,
        &[(1, p as f64), (params.k as u32 + 1, bmod * alpha.abs())],
        spec.tail_tol,
    )?;
    let r = integrate_real(&integrand, 0.0, t, spec)?;
    Ok(sign * r.value.re / (2.0 * PI))
}

/// Members of the `b = 0` subfamily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UMember {
    U,
    /// `f_j(z) = u(β_j z)`
    F(usize),
    /// The integral over the rotated contour `C_j`; equals `β_j f_j`.
    Uj(usize),
}

pub fn u_family_eval(
    n: usize,
    which: UMember,
    p: usize,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<EvalResult> {
    let params = PhiParams::u(n)?;
    match which {
        UMember::U => phi_eval(&params, p, z, spec),
        UMember::F(j) => {
            let beta_j = RootsOfUnity::new(n).get(j)?;
            let r = phi_eval(&params, p, beta_j * z, spec)?;
            Ok(r.scaled(beta_j.powu(p as u32)))
        }
        UMember::Uj(j) => {
            RootsOfUnity::new(n).get(j)?;
            let t = c_truncation(&params, p, z, spec.tail_tol)?;
            let path = standard_contour(ContourKind::Cj { n, j }, t)?;
            let mut r = integrate_path(&params.integrand(p, z), &path, spec)?.scaled(INV_TWO_PI_I);
            r.truncation_radius_used = Some(t);
            Ok(r)
        }
    }
}

fn check_selection(n: usize, js: &[usize]) -> Result<()> {
    if js.len() != n {
        return Err(Error::InvalidParams(format!(
            "need {n} indices, got {}",
            js.len()
        )));
    }
    for (i, &j) in js.iter().enumerate() {
        if j == 0 || j > n + 1 {
            return Err(Error::BadIndex { index: j, max: n + 1 });
        }
        if js[..i].contains(&j) {
            return Err(Error::DuplicateIndex(j));
        }
    }
    Ok(())
}

/// `W(f_{j_1}, …, f_{j_n})(0) = u(0)·u′(0)⋯u^{(n−1)}(0)·∏_{a<b}(β_{j_b} − β_{j_a})`.
pub fn phi_wronskian_zero(n: usize, js: &[usize]) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} < 2")));
    }
    check_selection(n, js)?;
    let roots = RootsOfUnity::new(n);
    let derivs: f64 = (0..n).map(|p| u_deriv_zero(n, p)).product();
    let mut vandermonde = Complex64::new(1.0, 0.0);
    for b in 0..n {
        for a in 0..b {
            vandermonde *= roots.get(js[b])? - roots.get(js[a])?;
        }
    }
    Ok(vandermonde * derivs)
}

/// `|φ^{(n)}(z) + (−1)^{n+1}·b·φ^{(k)}(z) + (−1)^{n+1}·z·φ(z)|`.
pub fn ode_residual_phi(params: &PhiParams, z: Complex64, spec: &QuadratureSpec) -> Result<f64> {
    let f0 = phi_eval(params, 0, z, spec)?.value;
    let fk = phi_eval(params, params.k, z, spec)?.value;
    let fnn = phi_eval(params, params.n, z, spec)?.value;
    let sign = if (params.n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok((fnn + sign * (params.b * fk + z * f0)).norm())
}

/// Residual of `f^{(n)} + (−1)^{n+1}·z·f = 0` for `f_j`.
pub fn ode_residual_fj(n: usize, j: usize, z: Complex64, spec: &QuadratureSpec) -> Result<f64> {
    let f0 = u_family_eval(n, UMember::F(j), 0, z, spec)?.value;
    let fnn = u_family_eval(n, UMember::F(j), n, z, spec)?.value;
    let sign = if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok((fnn + sign * z * f0).norm())
}
