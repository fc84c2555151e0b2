//! Randomised invariants.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use contour_odes::contours::{decay_sector_bounds, standard_contour, ContourKind, JContourSpec};
use contour_odes::phi::{ode_residual_fj, phi_eval, phi_eval_on, PhiContour, PhiParams};
use contour_odes::psi::{psi_eval, psi_eval_on_radius, PsiParams};
use contour_odes::quadrature::{
    integrate_circle_spectral, integrate_path, integrate_segment, trapezoid_circle, Contour,
    Orientation, PathSegment, QuadratureSpec,
};
use contour_odes::series::{
    psi_deriv_zero_exact, recurrence_extend, u_coeff, u_coeff_exact, SeriesFamily,
};
use num_traits::{Signed, Zero};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// Random entire integrand `c0 + c1 w + exp(a w)`.
fn entire() -> impl Strategy<Value = (Complex64, Complex64, Complex64)> {
    (point(2.0), point(2.0), point(1.5))
}

fn eval_entire((c0, c1, a): (Complex64, Complex64, Complex64)) -> impl Fn(Complex64) -> Complex64 {
    move |w| c0 + c1 * w + (a * w).exp()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn path_additivity_and_reversal(f in entire(), p0 in point(2.0), p1 in point(2.0), p2 in point(2.0)) {
        let g = eval_entire(f);
        let segs = vec![PathSegment::line(p0, p1), PathSegment::line(p1, p2)];
        let path = Contour::new(segs.clone()).unwrap();
        let total = integrate_path(&g, &path, &spec()).unwrap().value;
        let parts: Complex64 = segs.iter().map(|s| integrate_segment(&g, s, &spec()).unwrap().value).sum();
        prop_assert!((total - parts).norm() < 1e-12 * (1.0 + total.norm()));
        let back = integrate_path(&g, &path.reversed(), &spec()).unwrap().value;
        prop_assert!((total + back).norm() < 1e-12 * (1.0 + total.norm()));
        // analytic integrand: path independence
        let direct = integrate_segment(&g, &PathSegment::line(p0, p2), &spec()).unwrap().value;
        prop_assert!((total - direct).norm() < 1e-11 * (1.0 + total.norm()));
    }

    #[test]
    fn closed_curves_vanish(f in entire(), center in point(1.0), radius in 0.2f64..2.0, turn in 0.1f64..3.0) {
        let g = eval_entire(f);
        let circle = Contour::new(vec![PathSegment::circle(center, radius, Orientation::Ccw).unwrap()]).unwrap();
        let v = integrate_path(&g, &circle, &spec()).unwrap().value;
        let scale = (0..64).map(|j| g(center + Complex64::from_polar(radius, j as f64 * PI / 32.0)).norm()).fold(1.0, f64::max);
        prop_assert!(v.norm() < 10.0 * spec().abs_tol * scale * (1.0 + radius), "{}", v);

        // arc there and the chord back
        let a = center + Complex64::from_polar(radius, 0.0);
        let b = center + Complex64::from_polar(radius, turn);
        let lens = Contour::new(vec![
            PathSegment::arc(center, radius, 0.0, turn).unwrap(),
            PathSegment::line(b, a),
        ]).unwrap();
        let v = integrate_path(&g, &lens, &spec()).unwrap().value;
        prop_assert!(v.norm() < 10.0 * spec().abs_tol * scale * (1.0 + radius), "{}", v);
    }

    #[test]
    fn circle_radius_invariance(r1 in 0.3f64..3.0, r2 in 0.3f64..3.0) {
        let f = |w: Complex64| w.inv() * w.inv().exp();
        let zero = Complex64::new(0.0, 0.0);
        let a = integrate_circle_spectral(&f, zero, r1, &spec()).unwrap().value;
        let b = integrate_circle_spectral(&f, zero, r2, &spec()).unwrap().value;
        prop_assert!((a - b).norm() < 10.0 * spec().abs_tol * 2.0 * PI);
        prop_assert!((a - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn j_contour_geometry(n in 2usize..9, frac in -0.999f64..0.999, z_abs in 0.1f64..100.0) {
        let (_, hi) = decay_sector_bounds(n);
        let theta = frac * hi;
        let g = JContourSpec::new(theta, n, z_abs).unwrap();
        let m = n as f64 + 1.0;
        prop_assert!(-1.5 * PI < m * g.mu() && m * g.mu() < -0.5 * PI);
        prop_assert!(0.5 * PI < m * g.tau() && m * g.tau() < 1.5 * PI);
        prop_assert!(g.a_const() > 0.0);
        prop_assert!(g.b_const() < (m * g.a_const()).powf(1.0 / n as f64));
        let c = standard_contour(ContourKind::J { theta, n, z_abs }, g.radius() + 10.0).unwrap();
        for w in c.segments().windows(2) {
            prop_assert_eq!(w[0].end(), w[1].start());
        }
    }

    #[test]
    fn phi_contours_agree(n in 2usize..5, r in 2.0f64..5.0, frac in -0.8f64..0.8, b in -1.0f64..1.0) {
        let p = PhiParams::new(n, 1, Complex64::new(b, 0.0)).unwrap();
        let z = Complex64::from_polar(r, frac * decay_sector_bounds(n).1);
        let c = phi_eval_on(&p, 0, z, PhiContour::C, &spec()).unwrap();
        let j = phi_eval_on(&p, 0, z, PhiContour::J, &spec()).unwrap();
        prop_assert!((c.value - j.value).norm() <= c.error_estimate + j.error_estimate + 1e-12);
    }

    #[test]
    fn phi_real_for_real_b(n in 2usize..6, x in -3.0f64..3.0, b in -2.0f64..2.0) {
        let p = PhiParams::new(n, n - 1, Complex64::new(b, 0.0)).unwrap();
        let v = phi_eval(&p, 0, Complex64::new(x, 0.0), &spec()).unwrap().value;
        prop_assert!(v.im.abs() < 10.0 * spec().abs_tol, "{}", v);
    }

    #[test]
    fn rotated_solutions(n in 2usize..5, j in 1usize..6, z in point(2.0)) {
        prop_assume!(j <= n + 1);
        prop_assert!(ode_residual_fj(n, j, z, &spec()).unwrap() < 1e-9 * (1.0 + z.norm()));
    }

    #[test]
    fn psi_radius_and_parity(n in 3usize..8, k_off in 0usize..6, z in point(3.0), extra in 0.5f64..2.5) {
        let k = 2 + k_off % (n - 2);
        let p = PsiParams::new(n, k).unwrap();
        let base = p.default_radius(z);
        let a = psi_eval(&p, 0, z, &spec()).unwrap().value;
        let b = psi_eval_on_radius(&p, 0, z, extra * base, &spec()).unwrap().value;
        prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "{} vs {}", a, b);
        let x = psi_eval(&p, 0, Complex64::new(z.re, 0.0), &spec()).unwrap().value;
        prop_assert!(x.im.abs() < 1e-11 * (1.0 + x.norm()));
        if n % 2 == 0 && k % 2 == 1 {
            let m = psi_eval(&p, 0, -z, &spec()).unwrap().value;
            prop_assert!((a - m).norm() < 1e-11 * (1.0 + a.norm()));
            let y = psi_eval(&p, 0, Complex64::new(0.0, z.im), &spec()).unwrap().value;
            prop_assert!(y.im.abs() < 1e-11 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn residue_parity(half_n in 2usize..6, k_half in 1usize..5, s_half in 0usize..20) {
        let n = 2 * half_n;
        let k = (2 * k_half + 1).min(n - 1);
        let p = PsiParams::new(n, k).unwrap();
        prop_assert!(psi_deriv_zero_exact(&p, 2 * s_half + 1, 1e-16).is_zero());
    }

    #[test]
    fn recurrence_is_linear(n in 3usize..7, s1 in prop::collection::vec(-2.0f64..2.0, 6), s2 in prop::collection::vec(-2.0f64..2.0, 6), t in -3.0f64..3.0) {
        let fam = SeriesFamily::Psi(PsiParams::new(n, 2).unwrap());
        let a: Vec<Complex64> = s1[..n.min(6)].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let b: Vec<Complex64> = s2[..n.min(6)].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        prop_assume!(a.len() == n);
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y * t).collect();
        let ca = recurrence_extend(fam, &a, 30).unwrap();
        let cb = recurrence_extend(fam, &b, 30).unwrap();
        let cm = recurrence_extend(fam, &mix, 30).unwrap();
        for m in 0..=30 {
            let want = ca.coeffs[m] + cb.coeffs[m] * t;
            prop_assert!((cm.coeffs[m] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn u_coefficient_signs(nu in 1usize..150) {
        // exact, since a_{2ν} leaves the f64 range near ν = 65
        let a = u_coeff_exact(nu, 1e-18);
        prop_assert_eq!(a.is_positive(), nu % 2 == 1);
        prop_assert!(!a.is_zero());
        if nu < 60 {
            prop_assert_eq!(u_coeff(nu, 1e-18) > 0.0, nu % 2 == 1);
        }
    }
}

#[test]
fn spectral_doubling_halves_the_error() {
    // U's integrand at a moderate point
    let p = PsiParams::u();
    let z = Complex64::new(1.5, 0.5);
    let f = p.integrand(0, z);
    let zero = Complex64::new(0.0, 0.0);
    let reference = trapezoid_circle(&f, zero, 1.0, 4096);
    let mut prev = f64::INFINITY;
    let mut m = 8;
    while m <= 64 {
        let err = (trapezoid_circle(&f, zero, 1.0, m) - reference).norm();
        if err < 1e-13 {
            break;
        }
        assert!(err <= 0.5 * prev, "m = {m}: {err} vs {prev}");
        prev = err;
        m *= 2;
    }
}
