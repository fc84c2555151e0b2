//! Globally adaptive 7/15-point Gauss–Kronrod integration of complex-valued
//! functions of a real parameter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::QuadratureSpec;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    l1: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err;
    if resasc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / resasc).powf(1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * resabs);
    }
    scaled
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];

    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let err = ((res_k - res_g) * half).norm();
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;

    Panel {
        a,
        b,
        value: res_k * half,
        error: rescale_error(err, res_abs, res_asc),
        l1: res_abs,
    }
}

/// Outcome of adaptive integration over one interval.
#[derive(Debug, Clone, Copy)]
pub(crate) struct IntervalResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the summed estimate drops below
/// `max(abs_tol, rel_tol·|I|, 100·ε·∫|f|)`. The last term is the roundoff
/// floor for integrands that cancel heavily.
pub(crate) fn integrate_interval<F>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntervalResult>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    if a == b {
        return Ok(IntervalResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }

    let first = gk15(f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        let (mut value, mut error, mut l1) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for p in heap.iter() {
            value += p.value;
            error += p.error;
            l1 += p.l1;
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonConvergence(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        let target = spec
            .abs_tol
            .max(spec.rel_tol * value.norm())
            .max(100.0 * f64::EPSILON * l1);
        if error <= target {
            return Ok(IntervalResult {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "{} subdivisions on [{a}, {b}], error estimate {error:e} above target {target:e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gk15(f, worst.a, mid));
        heap.push(gk15(f, mid, worst.b));
        evaluations += 30;
    }
}
