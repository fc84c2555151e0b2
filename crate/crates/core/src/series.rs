//! Maclaurin coefficients.
//!
//! Residue sums and the closed form for `U` are accumulated in exact
//! rationals and only cast to `f64` at the end; `ln|c_m|` is kept alongside
//! because high-order coefficients of `U` underflow `f64` long before the
//! growth estimators are done with them.

use std::f64::consts::{E, LN_2, PI};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::phi::PhiParams;
use crate::psi::PsiParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SeriesFamily {
    Phi(PhiParams),
    Psi(PsiParams),
    /// Coefficients supplied directly by the caller.
    External,
}

impl SeriesFamily {
    fn order(&self) -> Option<usize> {
        match self {
            SeriesFamily::Phi(p) => Some(p.n()),
            SeriesFamily::Psi(p) => Some(p.n()),
            SeriesFamily::External => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    ResidueSum,
    ClosedFormU,
    Recurrence,
    QuadratureSeed,
}

/// Coefficients `c_m` of `Σ c_m z^m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCoeffs {
    pub family: SeriesFamily,
    pub coeffs: Vec<Complex64>,
    /// `ln|c_m|` (`-inf` for zero coefficients), accurate even where
    /// `coeffs[m]` has underflowed.
    pub log_abs: Vec<f64>,
    pub provenance: Provenance,
    pub trunc_tol: f64,
}

impl SeriesCoeffs {
    pub fn from_values(
        family: SeriesFamily,
        coeffs: Vec<Complex64>,
        provenance: Provenance,
        trunc_tol: f64,
    ) -> Self {
        let log_abs = coeffs.iter().map(|c| c.norm().ln()).collect();
        SeriesCoeffs {
            family,
            coeffs,
            log_abs,
            provenance,
            trunc_tol,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Partial sum `Σ_{m ≤ max_index} c_m z^m` (Horner).
    pub fn eval(&self, z: Complex64, max_index: usize) -> Complex64 {
        let top = max_index.min(self.coeffs.len().saturating_sub(1));
        self.coeffs[..=top]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map_or(f64::NEG_INFINITY, f64::ln)
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap_or(0.0).ln() + shift as f64 * LN_2
    }
}

/// `ln|r|` for an arbitrarily large or small rational.
pub fn ln_abs_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// Nearest `f64`; falls back to the logarithm for values outside the range
/// the direct conversion handles.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match r.to_f64() {
        Some(v) if v.is_finite() && v != 0.0 => v,
        _ => {
            let sign = if r.is_negative() { -1.0 } else { 1.0 };
            sign * ln_abs_rational(r).exp()
        }
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Adds terms produced by `term(t)` for `t = 0, 1, …` until the next term is
/// smaller than `trunc_tol` relative to the running sum. Terms must decrease
/// in magnitude.
fn sum_until<F>(trunc_tol: f64, mut term: F) -> BigRational
where
    F: FnMut(u64) -> BigRational,
{
    let ln_tol = trunc_tol.ln();
    let mut sum = term(0);
    for t in 1.. {
        let next = term(t);
        if next.is_zero() || ln_abs_rational(&next) < ln_tol + ln_abs_rational(&sum) {
            break;
        }
        sum += next;
    }
    sum
}

/// `u^{(p)}(0) = (−1)^p/π · sin((p+1)π/(n+1)) · (n+1)^{(p+1)/(n+1)−1} · Γ((p+1)/(n+1))`,
/// the closed form of the half-line integral `(−1)^p/π ∫₀^∞ r^p e^{−r^{n+1}/(n+1)} sin(…) dr`.
pub fn u_deriv_zero(n: usize, p: usize) -> f64 {
    let np1 = n as f64 + 1.0;
    if (p + 1) % (n + 1) == 0 {
        return 0.0;
    }
    let s = (p as f64 + 1.0) / np1;
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    sign / PI * (s * PI).sin() * np1.powf(s - 1.0) * gamma(s)
}

/// `ψ^{(s)}(0)` exactly, as the residue at 0 of
/// `w^{k−2−s}·exp{−σ w^{−(n−k+1)}}·exp{−η w^{k−1}}`: the double series
/// contributes `(−σ)^i (−η)^j / (i! j!)` for every `i, j ≥ 0` with
/// `j(k−1) − i(n−k+1) = s + 1 − k`.
pub fn psi_deriv_zero_exact(params: &PsiParams, s: usize, trunc_tol: f64) -> BigRational {
    let q = (params.n() - params.k() + 1) as i64;
    let p = (params.k() - 1) as i64;
    let target = s as i64 + 1 - params.k() as i64;
    let g = gcd(p, q);
    if target.rem_euclid(g) != 0 {
        return BigRational::zero();
    }
    // smallest i >= 0 giving a nonnegative integer j
    let period_i = p / g;
    let mut i0 = None;
    let start = if target < 0 { (-target + q - 1) / q } else { 0 };
    for i in start..start + period_i + 1 {
        let rhs = target + i * q;
        if rhs >= 0 && rhs % p == 0 {
            i0 = Some(i);
            break;
        }
    }
    let Some(i0) = i0 else {
        return BigRational::zero();
    };
    let j0 = (target + i0 * q) / p;
    let (di, dj) = (p / g, q / g);

    let qb = BigInt::from(q);
    let pb = BigInt::from(p);
    sum_until(trunc_tol, |t| {
        let i = (i0 + t as i64 * di) as u64;
        let j = (j0 + t as i64 * dj) as u64;
        let denom = num_traits::pow(qb.clone(), i as usize)
            * num_traits::pow(pb.clone(), j as usize)
            * factorial(i)
            * factorial(j);
        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
        BigRational::new(BigInt::from(sign), denom)
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `ψ^{(s)}(0)` from the residue sum.
pub fn psi_deriv_zero_sum(params: &PsiParams, s: usize, trunc_tol: f64) -> f64 {
    rational_to_f64(&psi_deriv_zero_exact(params, s, trunc_tol))
}

/// Maclaurin coefficient `a_{2ν}` of `U` in exact arithmetic:
///
/// ```text
/// a_0    = −½ Σ_m 1/(4^m m! (m+1)!)
/// a_{2ν} = (−1)^{ν+1} / (2^{ν−1} (2ν)!) · Σ_m 1/(4^m m! (m+ν−1)!),  ν ≥ 1
/// ```
pub fn u_coeff_exact(nu: usize, trunc_tol: f64) -> BigRational {
    let four = BigInt::from(4);
    if nu == 0 {
        let s = sum_until(trunc_tol, |m| {
            BigRational::new(
                BigInt::one(),
                num_traits::pow(four.clone(), m as usize) * factorial(m) * factorial(m + 1),
            )
        });
        return -s / BigInt::from(2);
    }
    let s = sum_until(trunc_tol, |m| {
        BigRational::new(
            BigInt::one(),
            num_traits::pow(four.clone(), m as usize) * factorial(m) * factorial(m + nu as u64 - 1),
        )
    });
    let prefactor = BigRational::new(
        BigInt::one(),
        num_traits::pow(BigInt::from(2), nu - 1) * factorial(2 * nu as u64),
    );
    let signed = if nu % 2 == 1 { s } else { -s };
    signed * prefactor
}

pub fn u_coeff(nu: usize, trunc_tol: f64) -> f64 {
    rational_to_f64(&u_coeff_exact(nu, trunc_tol))
}

fn from_exact(family: SeriesFamily, exact: Vec<BigRational>, provenance: Provenance, tol: f64) -> SeriesCoeffs {
    let coeffs = exact
        .iter()
        .map(|r| Complex64::new(rational_to_f64(r), 0.0))
        .collect();
    let log_abs = exact.iter().map(ln_abs_rational).collect();
    SeriesCoeffs {
        family,
        coeffs,
        log_abs,
        provenance,
        trunc_tol: tol,
    }
}

/// Coefficients `a_0, 0, a_2, 0, …, a_{2·max_nu}` of `U` from the closed form.
pub fn u_series(max_nu: usize, trunc_tol: f64) -> SeriesCoeffs {
    let mut exact = Vec::with_capacity(2 * max_nu + 1);
    for nu in 0..=max_nu {
        if nu > 0 {
            exact.push(BigRational::zero());
        }
        exact.push(u_coeff_exact(nu, trunc_tol));
    }
    from_exact(
        SeriesFamily::Psi(PsiParams::u()),
        exact,
        Provenance::ClosedFormU,
        trunc_tol,
    )
}

/// `c_s = ψ^{(s)}(0)/s!` for `s = 0..=max_s` from the residue sums.
pub fn psi_series_residue(params: &PsiParams, max_s: usize, trunc_tol: f64) -> SeriesCoeffs {
    let exact = (0..=max_s)
        .map(|s| psi_deriv_zero_exact(params, s, trunc_tol) / factorial(s as u64))
        .collect();
    from_exact(SeriesFamily::Psi(*params), exact, Provenance::ResidueSum, trunc_tol)
}

// (m+a)!/m! for small a
fn rising(m: usize, a: usize) -> f64 {
    (1..=a).map(|i| (m + i) as f64).product()
}

/// Extends `n` derivatives at 0 to coefficients `c_0..=c_{m_max}` through the
/// power-series recurrence of the family's equation.
pub fn recurrence_extend(family: SeriesFamily, seed: &[Complex64], m_max: usize) -> Result<SeriesCoeffs> {
    let n = family
        .order()
        .ok_or_else(|| Error::InvalidParams("external coefficients have no recurrence".into()))?;
    if seed.len() != n {
        return Err(Error::SeedLengthMismatch {
            expected: n,
            got: seed.len(),
        });
    }
    if m_max < n {
        return Err(Error::InvalidParams(format!("m_max = {m_max} < n = {n}")));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); m_max + 1];
    let mut fact = 1.0;
    for (m, d) in seed.iter().enumerate() {
        if m > 0 {
            fact *= m as f64;
        }
        c[m] = d / fact;
    }
    match family {
        SeriesFamily::Phi(params) => {
            // c_{m+n}(m+n)!/m! = −(−1)^{n+1} [b c_{m+k}(m+k)!/m! + c_{m−1}]
            let k = params.k();
            let sign = if (n + 1) % 2 == 0 { -1.0 } else { 1.0 };
            for m in 0..=(m_max - n) {
                let prev = if m >= 1 { c[m - 1] } else { Complex64::new(0.0, 0.0) };
                let rhs = params.b() * c[m + k] * rising(m, k) + prev;
                c[m + n] = sign * rhs / rising(m, n);
            }
        }
        SeriesFamily::Psi(params) => {
            // c_{m+n}(m+n)!/m! = c_{m+k−1}(m+k−1)!/(m−1)!·[m ≥ 1] + c_m
            let k = params.k();
            for m in 0..=(m_max - n) {
                let mut rhs = c[m];
                if m >= 1 {
                    rhs += c[m + k - 1] * rising(m - 1, k);
                }
                c[m + n] = rhs / rising(m, n);
            }
        }
        SeriesFamily::External => unreachable!(),
    }
    Ok(SeriesCoeffs::from_values(family, c, Provenance::Recurrence, 0.0))
}

/// Order and type read off the Maclaurin coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderTypeEstimate {
    pub rho_hat: f64,
    pub tau_hat: f64,
    pub nu_used: usize,
    /// `max m·ln m / (−ln|c_m|)` over the same indices; converges to the
    /// order only like `1/ln m`.
    pub rho_limsup: f64,
}

/// Solves the least-squares problem `min ‖A x − y‖` via normal equations.
pub(crate) fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = rows.first()?.len();
    let mut ata = vec![vec![0.0; k + 1]; k];
    for (row, &yi) in rows.iter().zip(y) {
        for a in 0..k {
            for b in 0..k {
                ata[a][b] += row[a] * row[b];
            }
            ata[a][k] += row[a] * yi;
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| ata[a][col].abs().total_cmp(&ata[b][col].abs()))?;
        ata.swap(col, pivot);
        let d = ata[col][col];
        if d.abs() < 1e-300 {
            return None;
        }
        for r in 0..k {
            if r != col {
                let f = ata[r][col] / d;
                for cc in col..=k {
                    ata[r][cc] -= f * ata[col][cc];
                }
            }
        }
    }
    Some((0..k).map(|i| ata[i][k] / ata[i][i]).collect())
}

/// Minimum number of informative coefficients.
pub const MIN_COEFFICIENTS: usize = 20;

/// Estimates order and type from the upper half of the informative
/// coefficients.
///
/// For an entire function of order ρ and type τ, `|c_m|^{1/m} ≈ (eρτ/m)^{1/ρ}`,
/// so `−ln|c_m|/m` is affine in `ln m` with slope `1/ρ`. The fit also carries
/// `ln m/m` and `1/m` columns for the Stirling-type corrections. The type is
/// then the largest `m·|c_m|^{ρ̂/m}/(eρ̂)` over the same indices.
pub fn order_type_estimate(coeffs: &SeriesCoeffs, even_only: bool) -> Result<OrderTypeEstimate> {
    let usable: Vec<(f64, f64)> = coeffs
        .log_abs
        .iter()
        .enumerate()
        .filter(|(m, la)| *m >= 2 && la.is_finite() && (!even_only || m % 2 == 0))
        .map(|(m, &la)| (m as f64, la))
        .collect();
    if usable.len() < MIN_COEFFICIENTS {
        return Err(Error::TooFewCoefficients {
            needed: MIN_COEFFICIENTS,
            got: usable.len(),
        });
    }
    let top = &usable[usable.len() / 2..];

    let rows: Vec<Vec<f64>> = top
        .iter()
        .map(|&(m, _)| vec![m.ln(), 1.0, m.ln() / m, 1.0 / m])
        .collect();
    let y: Vec<f64> = top.iter().map(|&(m, la)| -la / m).collect();
    let fit = least_squares(&rows, &y)
        .ok_or_else(|| Error::InvalidParams("singular order regression".into()))?;
    let rho_hat = 1.0 / fit[0];

    let tau_hat = top
        .iter()
        .map(|&(m, la)| m * (rho_hat * la / m).exp() / (E * rho_hat))
        .fold(f64::NEG_INFINITY, f64::max);
    let rho_limsup = top
        .iter()
        .map(|&(m, la)| m * m.ln() / (-la))
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(OrderTypeEstimate {
        rho_hat,
        tau_hat,
        nu_used: top.len(),
        rho_limsup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_deriv_zero_values() {
        assert!((u_deriv_zero(2, 0) - 0.355_028_053_887_817_2).abs() < 1e-15);
        assert!((u_deriv_zero(2, 1) + 0.258_819_403_792_806_8).abs() < 1e-15);
        assert_eq!(u_deriv_zero(2, 2), 0.0);
        assert_eq!(u_deriv_zero(3, 3), 0.0);
        let want = (PI / 4.0).sin() / PI * 4f64.powf(-0.75) * gamma(0.25);
        assert!((u_deriv_zero(3, 0) - want).abs() < 1e-15);
        for n in 2..8 {
            for p in 0..n {
                assert!(u_deriv_zero(n, p) != 0.0);
            }
        }
    }

    #[test]
    fn u_coefficients() {
        assert!((u_coeff(0, 1e-18) + 0.565_159_103_992_485).abs() < 1e-14);
        assert!((u_coeff(1, 1e-18) - 0.633_032_938_876_004_2).abs() < 1e-14);
        for nu in 1..40 {
            let a = u_coeff(nu, 1e-18);
            let sign = if nu % 2 == 1 { 1.0 } else { -1.0 };
            assert!(sign * a > 0.0, "nu = {nu}");
        }
    }

    #[test]
    fn residue_sums_for_u() {
        let u = PsiParams::u();
        assert!((psi_deriv_zero_sum(&u, 0, 1e-18) + 0.565_159_103_992_485).abs() < 1e-14);
        assert_eq!(psi_deriv_zero_exact(&u, 1, 1e-18), BigRational::zero());
        assert!((psi_deriv_zero_sum(&u, 2, 1e-18) - 1.266_065_877_752_008_4).abs() < 1e-14);
    }

    #[test]
    fn parity_of_residue_sums() {
        for (n, k) in [(4, 3), (6, 3), (6, 5), (8, 3)] {
            let p = PsiParams::new(n, k).unwrap();
            for s in (1..30).step_by(2) {
                assert!(psi_deriv_zero_exact(&p, s, 1e-16).is_zero(), "({n},{k}) s={s}");
            }
        }
    }

    #[test]
    fn huge_rationals_keep_their_logarithm() {
        let a = u_coeff_exact(200, 1e-16);
        let la = ln_abs_rational(&a);
        assert!(la < -2000.0 && la.is_finite());
        assert_eq!(u_coeff(200, 1e-16), 0.0);
    }

    #[test]
    fn airy_recurrence() {
        let fam = SeriesFamily::Phi(PhiParams::u(2).unwrap());
        let seed = [
            Complex64::new(u_deriv_zero(2, 0), 0.0),
            Complex64::new(u_deriv_zero(2, 1), 0.0),
        ];
        let s = recurrence_extend(fam, &seed, 30).unwrap();
        for m in 1..=28 {
            let want = s.coeffs[m - 1] / ((m + 2) as f64 * (m + 1) as f64);
            assert!((s.coeffs[m + 2] - want).norm() <= 1e-16 * want.norm());
        }
        assert_eq!(s.coeffs[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zero_seed() {
        let fam = SeriesFamily::Psi(PsiParams::new(5, 3).unwrap());
        let s = recurrence_extend(fam, &[Complex64::new(0.0, 0.0); 5], 40).unwrap();
        assert!(s.coeffs.iter().all(|c| c.norm() == 0.0));
        assert_eq!(
            recurrence_extend(fam, &[Complex64::new(0.0, 0.0); 3], 40),
            Err(Error::SeedLengthMismatch { expected: 5, got: 3 })
        );
    }

    #[test]
    fn exponential_has_order_one() {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for m in 1..80 {
            let prev = c[m - 1];
            c.push(prev / m as f64);
        }
        let s = SeriesCoeffs::from_values(SeriesFamily::External, c, Provenance::QuadratureSeed, 0.0);
        let est = order_type_estimate(&s, false).unwrap();
        assert!((est.rho_hat - 1.0).abs() < 1e-3, "{est:?}");
        assert!((est.tau_hat - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn too_few_coefficients() {
        let s = u_series(10, 1e-16);
        assert!(matches!(
            order_type_estimate(&s, true),
            Err(Error::TooFewCoefficients { .. })
        ));
    }
}
