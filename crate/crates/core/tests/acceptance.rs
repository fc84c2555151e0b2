//! Acceptance gate. Each criterion prints one `PASS` or `FAIL` line with the
//! measured quantities; the process fails if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use contour_odes::phi::{ode_residual_phi, phi_eval, phi_wronskian_zero, PhiParams};
use contour_odes::psi::{
    h_prime_zero, ode_residual_psi, psi_eval, special_eval, PsiParams, SpecialFunction,
};
use contour_odes::quadrature::QuadratureSpec;
use contour_odes::series::{order_type_estimate, u_coeff, u_deriv_zero, u_series};
use contour_odes::verify::{
    decay_fit, disk_points, estimate_order_max_modulus, max_modulus, run_property,
    triple_agreement_u, stirling_log_bounds, GridSpec,
};
use contour_odes::Result;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn u_at_origin(spec: &QuadratureSpec) -> Result<Outcome> {
    let out = Command::new(env!("CARGO_BIN_EXE_contour-odes"))
        .args(["eval", "--family", "U", "--z", "0"])
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout);
    let record: serde_json::Value = serde_json::from_str(text.trim()).expect("one JSON record");
    let cli_value = record["value_re"].as_f64().unwrap_or(f64::NAN);
    let a0 = u_coeff(0, 1e-18);
    let quad = special_eval(SpecialFunction::U, 0, c(0.0, 0.0), spec)?.value.re;
    let ok = out.status.success()
        && (cli_value + 0.5652).abs() < 5e-4
        && (cli_value - a0).abs() < 1e-9
        && (quad - a0).abs() < 1e-9;
    outcome(ok, format!("cli U(0) = {cli_value:.12}, a_0 = {a0:.12}, |diff| = {:.1e}", (cli_value - a0).abs()))
}

fn identity(spec: &QuadratureSpec) -> Result<Outcome> {
    let r = run_property("identity_UH", None, &GridSpec::Disk { radius: 2.0, count: 20 }, spec)?;
    outcome(r.passed && r.max_violation < 1e-7, format!("max |2 pi i U - H - H(-z)|/(1+|H|) = {:.2e} over 20 points", r.max_violation))
}

fn order_type_from_coefficients() -> Result<Outcome> {
    let est = order_type_estimate(&u_series(200, 1e-16), true)?;
    let ok = (0.647..=0.687).contains(&est.rho_hat) && (1.45..=1.55).contains(&est.tau_hat);
    outcome(ok, format!("rho_hat = {:.4}, tau_hat = {:.4} (limsup order formula {:.4})", est.rho_hat, est.tau_hat, est.rho_limsup))
}

fn ode_residuals(spec: &QuadratureSpec) -> Result<Outcome> {
    let grid = disk_points(2.0, 10);
    let mut worst: f64 = 0.0;
    for (n, k, b) in [(2, 1, c(0.0, 0.0)), (3, 1, c(1.0, 0.0)), (4, 2, c(1.0, 1.0))] {
        let p = PhiParams::new(n, k, b)?;
        for &z in &grid {
            worst = worst.max(ode_residual_phi(&p, z, spec)? / (1.0 + z.norm()));
        }
    }
    for (n, k) in [(3, 2), (4, 3), (5, 3)] {
        let p = PsiParams::new(n, k)?;
        for &z in &grid {
            worst = worst.max(ode_residual_psi(&p, z, spec)? / (1.0 + z.norm()));
        }
    }
    outcome(worst < 1e-6, format!("max residual/(1+|z|) = {worst:.2e} over 6 parameter sets x 10 points"))
}

fn airy(spec: &QuadratureSpec) -> Result<Outcome> {
    let p = PhiParams::u(2)?;
    let v0 = phi_eval(&p, 0, c(0.0, 0.0), spec)?.value;
    let v1 = phi_eval(&p, 1, c(0.0, 0.0), spec)?.value;
    let e0 = (v0 - u_deriv_zero(2, 0)).norm();
    let e1 = (v1 - u_deriv_zero(2, 1)).norm();
    let ok = e0 < 1e-9 && e1 < 1e-9 && (u_deriv_zero(2, 0) - 0.3550280539).abs() < 1e-10
        && (u_deriv_zero(2, 1) + 0.2588194038).abs() < 1e-10;
    outcome(ok, format!("|phi(0) - oracle| = {e0:.1e}, |phi'(0) - oracle| = {e1:.1e}"))
}

fn g_consistency(spec: &QuadratureSpec) -> Result<Outcome> {
    let grid = GridSpec::Disk { radius: 2.0, count: 5 };
    let a = run_property("G_psi_consistency", None, &grid, spec)?;
    let b = run_property("G_radius_invariance", None, &grid, spec)?;
    outcome(
        a.max_violation < 1e-8 && b.max_violation < 1e-9,
        format!("|2 pi i psi - G| = {:.1e}, |G_1 - G_2| = {:.1e}", a.max_violation, b.max_violation),
    )
}

fn growth_orders(spec: &QuadratureSpec) -> Result<Outcome> {
    let airy = PhiParams::u(2)?;
    let ai = |z: Complex64| Ok(phi_eval(&airy, 0, z, spec)?.value);
    let u = |z: Complex64| Ok(special_eval(SpecialFunction::U, 0, z, spec)?.value);
    let g_params = PsiParams::new(3, 2)?;
    let g = |z: Complex64| Ok(psi_eval(&g_params, 0, z, spec)?.value);
    let d_ai = estimate_order_max_modulus(&ai, &[4.0, 6.0, 8.0, 10.0, 12.0, 14.0], 128)?;
    let d_u = estimate_order_max_modulus(&u, &[8.0, 12.0, 16.0, 20.0, 24.0], 128)?;
    let d_g = estimate_order_max_modulus(&g, &[16.0, 24.0, 32.0, 40.0, 48.0], 128)?;
    let ok = (d_ai - 1.5).abs() <= 0.05 && (d_u - 2.0 / 3.0).abs() <= 0.05 && (d_g - 0.5).abs() <= 0.05;
    outcome(ok, format!("d(u, n=2) = {d_ai:.4}, d(U) = {d_u:.4}, d(psi(3,2)) = {d_g:.4}"))
}

fn decay_sector(spec: &QuadratureSpec) -> Result<Outcome> {
    let p = PhiParams::u(2)?;
    let radii: Vec<f64> = (2..=8).map(f64::from).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for theta in [0.0, 0.3, -0.3, 0.9, -0.9] {
        let (sign, k) = decay_fit(&p, theta, &radii, spec)?;
        ok &= sign == -1 && k > 0.1;
        if theta == 0.0 {
            ok &= (k - 2.0 / 3.0).abs() <= 0.05;
        }
        parts.push(format!("theta={theta}: k_hat={k:.4}"));
    }
    outcome(ok, parts.join(", "))
}

fn independence(spec: &QuadratureSpec) -> Result<Outcome> {
    let mut smallest = f64::INFINITY;
    for n in 2..=4 {
        for omit in 1..=n + 1 {
            let js: Vec<usize> = (1..=n + 1).filter(|&j| j != omit).collect();
            smallest = smallest.min(phi_wronskian_zero(n, &js)?.norm());
        }
    }
    let u0_quad = special_eval(SpecialFunction::U, 0, c(0.0, 0.0), spec)?.value;
    let u0 = u_coeff(0, 1e-18);
    let hp_quad = special_eval(SpecialFunction::H, 1, c(0.0, 0.0), spec)?.value;
    let hp = h_prime_zero(spec)?;
    let w = u0 * hp;
    let ok = smallest > 1e-6
        && (u0_quad - u0).norm() < 1e-8
        && (hp_quad - hp).norm() < 1e-8
        && w.abs() > 1e-6;
    outcome(ok, format!("min |W(f_j)(0)| = {smallest:.4e}, U(0) H'(0) = {w:.6} (H'(0) = {hp:.10})"))
}

fn parity_reality(spec: &QuadratureSpec) -> Result<Outcome> {
    let u = PsiParams::u();
    let mut even: f64 = 0.0;
    let mut imag: f64 = 0.0;
    for &z in &disk_points(3.0, 20) {
        even = even.max((psi_eval(&u, 0, z, spec)?.value - psi_eval(&u, 0, -z, spec)?.value).norm());
    }
    for i in 0..=30 {
        let t = -3.0 + 0.2 * i as f64;
        imag = imag.max(psi_eval(&u, 0, c(t, 0.0), spec)?.value.im.abs());
        imag = imag.max(psi_eval(&u, 0, c(0.0, t), spec)?.value.im.abs());
    }
    let mut most_negative_ok = true;
    let mut max_re = f64::NEG_INFINITY;
    for i in 0..=100 {
        let v = special_eval(SpecialFunction::U, 0, c(0.0, 0.1 * i as f64), spec)?.value;
        max_re = max_re.max(v.re);
        most_negative_ok &= v.re < 0.0;
    }
    let samples = 256;
    let step = 2.0 * PI / samples as f64;
    let ufun = |z: Complex64| Ok(special_eval(SpecialFunction::U, 0, z, spec)?.value);
    let mut worst_angle: f64 = 0.0;
    for r in [4.0, 6.0, 8.0] {
        let (_, theta) = max_modulus(&ufun, r, samples)?;
        worst_angle = worst_angle.max((theta.abs() - FRAC_PI_2).abs());
    }
    let ok = even < 1e-9 && imag < 1e-9 && most_negative_ok && worst_angle <= step;
    outcome(
        ok,
        format!("even {even:.1e}, Im {imag:.1e}, max Re U(iy) = {max_re:.4}, argmax offset {worst_angle:.1e}"),
    )
}

fn coefficient_agreement() -> Result<Outcome> {
    let diffs = triple_agreement_u(30, 1e-18)?;
    let worst = diffs.iter().map(|r| r.violation).fold(0.0, f64::max);
    let series = u_series(200, 1e-16);
    let mut sandwich = true;
    for nu in 20..=200 {
        let (lo, hi) = stirling_log_bounds(nu);
        let la = series.log_abs[2 * nu];
        sandwich &= lo <= la && la <= hi;
    }
    outcome(worst < 1e-10 && sandwich, format!("max pairwise difference {worst:.1e}, Stirling sandwich holds for 20..=200: {sandwich}"))
}

fn main() {
    let spec = QuadratureSpec::default();
    type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("U(0) reproduction", Box::new(|| u_at_origin(&spec))),
        ("U/H identity", Box::new(|| identity(&spec))),
        ("order/type from coefficients", Box::new(order_type_from_coefficients)),
        ("ODE residuals", Box::new(|| ode_residuals(&spec))),
        ("Airy cross-check", Box::new(|| airy(&spec))),
        ("G consistency", Box::new(|| g_consistency(&spec))),
        ("growth orders", Box::new(|| growth_orders(&spec))),
        ("decay sector", Box::new(|| decay_sector(&spec))),
        ("independence", Box::new(|| independence(&spec))),
        ("parity/reality/imaginary axis", Box::new(|| parity_reality(&spec))),
        ("coefficient agreement", Box::new(coefficient_agreement)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(o) => {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                failures += usize::from(!o.passed);
                println!("{tag} criterion {:>2} ({name}): {} [{secs:.2}s]", i + 1, o.detail);
            }
            Err(e) => {
                failures += 1;
                println!("FAIL criterion {:>2} ({name}): error: {e} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
