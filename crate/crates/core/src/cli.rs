//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::Error;
use crate::phi::{phi_eval, u_family_eval, PhiParams, UMember};
use crate::psi::{psi_eval, special_eval, PsiParams, SpecialFunction};
use crate::quadrature::{EvalResult, QuadratureSpec};
use crate::series::{
    order_type_estimate, psi_series_residue, recurrence_extend, u_deriv_zero, u_series,
    SeriesCoeffs, SeriesFamily,
};
use crate::verify::{default_params, registered_properties, run_property, GridSpec, PropertyParams};

/// Environment variable overriding the default absolute tolerance.
pub const TOL_ENV: &str = "CONTOUR_ODES_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_UNWRITABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "contour-odes", version, about = "Evaluate and check contour-integral ODE solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a function (or derivative) at one or more points.
    Eval(EvalArgs),
    /// Print Maclaurin coefficients.
    Coeffs(CoeffArgs),
    /// Run property checks and stream JSON reports.
    Verify(VerifyArgs),
    /// Evaluate over a ray, circle or rectangle.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    #[value(name = "phi")]
    Phi,
    #[value(name = "psi")]
    Psi,
    #[value(name = "u")]
    LowerU,
    #[value(name = "fj")]
    Fj,
    #[value(name = "uj")]
    Uj,
    #[value(name = "U")]
    U,
    #[value(name = "H")]
    H,
    #[value(name = "Hneg")]
    HNeg,
    #[value(name = "G")]
    G,
    #[value(name = "Ai")]
    Ai,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    #[value(name = "2pii")]
    TwoPiI,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Absolute tolerance (default 1e-13, or $CONTOUR_ODES_TOL).
    #[arg(long = "abs-tol")]
    abs_tol: Option<f64>,
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct FunctionArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Complex coefficient, e.g. `1`, `1+1i`, `-0.5i`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Option<Complex64>,
    #[arg(long)]
    j: Option<usize>,
    /// Circle radius for G.
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Derivative order.
    #[arg(long, default_value_t = 0)]
    deriv: usize,
    /// Multiply every value by a constant.
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Evaluation point; repeat for several.
    #[arg(long, required = true, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoeffFamily {
    #[value(name = "U")]
    U,
    #[value(name = "psi")]
    Psi,
    #[value(name = "phi")]
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProvenanceArg {
    ClosedForm,
    Residue,
    Recurrence,
}

#[derive(Debug, Args)]
struct CoeffArgs {
    #[arg(long, value_enum)]
    family: CoeffFamily,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Option<Complex64>,
    /// Highest ν for U (coefficients a_0 … a_{2ν}).
    #[arg(long = "max-nu")]
    max_nu: Option<usize>,
    /// Highest index for psi or phi.
    #[arg(long = "max-s")]
    max_s: Option<usize>,
    #[arg(long, value_enum)]
    provenance: Option<ProvenanceArg>,
    /// Stop partial sums once the next term is this small relative to the sum.
    #[arg(long = "trunc-tol", default_value_t = 1e-18)]
    trunc_tol: f64,
    /// Append an order/type estimate.
    #[arg(long)]
    estimate: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run every registered property.
    #[arg(long, conflicts_with = "property")]
    all: bool,
    /// Property id; repeat for several.
    #[arg(long)]
    property: Vec<String>,
    /// List the registered properties and exit.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Option<Complex64>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Ray direction in radians (use with --r).
    #[arg(long, allow_hyphen_values = true, requires = "r")]
    ray: Option<f64>,
    /// Radii `from:to:step` along the ray.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Circle radius (use with --points).
    #[arg(long)]
    circle: Option<f64>,
    #[arg(long, default_value_t = 128)]
    points: usize,
    /// Rectangle `x0:x1:y0:y1:step`.
    #[arg(long, allow_hyphen_values = true)]
    rect: Option<String>,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&t).map_err(|_| format!("not a complex number: `{s}`"))
}

/// A CLI failure together with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
            _ => EXIT_BAD_ARGS,
        };
        Failure { code, message: e.to_string() }
    }
}

fn bad(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_BAD_ARGS,
        message: message.into(),
    }
}

fn quadrature_spec(tol: &TolArgs) -> Result<QuadratureSpec, Failure> {
    let mut spec = QuadratureSpec::default();
    if let Ok(v) = std::env::var(TOL_ENV) {
        spec.abs_tol = v
            .trim()
            .parse()
            .map_err(|_| bad(format!("{TOL_ENV}={v} is not a number")))?;
    }
    if let Some(a) = tol.abs_tol {
        spec.abs_tol = a;
    }
    if let Some(r) = tol.rel_tol {
        spec.rel_tol = r;
    }
    spec.validate()?;
    Ok(spec)
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

/// One evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub function_id: String,
    pub z: Complex64,
    pub value: Complex64,
    pub error_estimate: f64,
}

impl OutputRecord {
    pub const CSV_HEADER: &'static str = "function_id,z_re,z_im,value_re,value_im,error_estimate";

    pub fn to_json(&self) -> String {
        format!(
            "{{\"function_id\":{},\"z_re\":{},\"z_im\":{},\"value_re\":{},\"value_im\":{},\"error_estimate\":{}}}",
            serde_json::to_string(&self.function_id).unwrap_or_default(),
            fmt_f64(self.z.re),
            fmt_f64(self.z.im),
            fmt_f64(self.value.re),
            fmt_f64(self.value.im),
            fmt_f64(self.error_estimate)
        )
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.function_id,
            fmt_f64(self.z.re),
            fmt_f64(self.z.im),
            fmt_f64(self.value.re),
            fmt_f64(self.value.im),
            fmt_f64(self.error_estimate)
        )
    }
}

/// A validated function choice that can be evaluated repeatedly.
struct Target {
    id: String,
    kind: TargetKind,
    deriv: usize,
    scale: Complex64,
}

enum TargetKind {
    Phi(PhiParams),
    Psi(PsiParams),
    UFamily(usize, UMember),
    Special(SpecialFunction),
}

fn fmt_complex_short(b: Complex64) -> String {
    if b.im == 0.0 {
        format!("{}", b.re)
    } else {
        format!("{}{:+}i", b.re, b.im)
    }
}

impl Target {
    fn from_args(a: &FunctionArgs) -> Result<Self, Failure> {
        let need_n = || a.n.ok_or_else(|| bad("--n is required for this family"));
        let need_j = || a.j.ok_or_else(|| bad("--j is required for this family"));
        let (id, kind) = match a.family {
            Family::Phi => {
                let n = need_n()?;
                let k = a.k.unwrap_or(1);
                let b = a.b.unwrap_or_default();
                (
                    format!("phi(n={n},k={k},b={})", fmt_complex_short(b)),
                    TargetKind::Phi(PhiParams::new(n, k, b)?),
                )
            }
            Family::Psi => {
                let n = need_n()?;
                let k = a.k.ok_or_else(|| bad("--k is required for psi"))?;
                (format!("psi(n={n},k={k})"), TargetKind::Psi(PsiParams::new(n, k)?))
            }
            Family::LowerU => {
                let n = need_n()?;
                PhiParams::u(n)?;
                (format!("u(n={n})"), TargetKind::UFamily(n, UMember::U))
            }
            Family::Fj => {
                let (n, j) = (need_n()?, need_j()?);
                PhiParams::u(n)?;
                (format!("f{j}(n={n})"), TargetKind::UFamily(n, UMember::F(j)))
            }
            Family::Uj => {
                let (n, j) = (need_n()?, need_j()?);
                PhiParams::u(n)?;
                (format!("u{j}(n={n})"), TargetKind::UFamily(n, UMember::Uj(j)))
            }
            Family::U => ("U".into(), TargetKind::Special(SpecialFunction::U)),
            Family::H => ("H".into(), TargetKind::Special(SpecialFunction::H)),
            Family::HNeg => ("Hneg".into(), TargetKind::Special(SpecialFunction::HNeg)),
            Family::G => {
                let radius = a.radius.unwrap_or(1.0);
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(bad(format!("--R must be positive, got {radius}")));
                }
                (format!("G(R={radius})"), TargetKind::Special(SpecialFunction::G { radius }))
            }
            Family::Ai => ("Ai".into(), TargetKind::UFamily(2, UMember::U)),
        };
        if let TargetKind::UFamily(n, UMember::F(j) | UMember::Uj(j)) = kind {
            if j == 0 || j > n + 1 {
                return Err(Error::BadIndex { index: j, max: n + 1 }.into());
            }
        }
        let mut id = id;
        if a.deriv > 0 {
            let _ = write!(id, "^({})", a.deriv);
        }
        let scale = match a.scale {
            Some(Scale::TwoPiI) => {
                id.insert_str(0, "2pii*");
                Complex64::new(0.0, 2.0 * std::f64::consts::PI)
            }
            None => Complex64::new(1.0, 0.0),
        };
        Ok(Target {
            id,
            kind,
            deriv: a.deriv,
            scale,
        })
    }

    fn eval(&self, z: Complex64, spec: &QuadratureSpec) -> Result<OutputRecord, Failure> {
        let p = self.deriv;
        let r: EvalResult = match self.kind {
            TargetKind::Phi(params) => phi_eval(&params, p, z, spec)?,
            TargetKind::Psi(params) => psi_eval(&params, p, z, spec)?,
            TargetKind::UFamily(n, which) => u_family_eval(n, which, p, z, spec)?,
            TargetKind::Special(f) => special_eval(f, p, z, spec)?,
        };
        let r = r.scaled(self.scale);
        Ok(OutputRecord {
            function_id: self.id.clone(),
            z,
            value: r.value,
            error_estimate: r.error_estimate,
        })
    }
}

fn emit_records(records: &[OutputRecord], format: Format, out: &mut dyn Write) -> io::Result<()> {
    if format == Format::Csv {
        writeln!(out, "{}", OutputRecord::CSV_HEADER)?;
    }
    for r in records {
        match format {
            Format::Json => writeln!(out, "{}", r.to_json())?,
            Format::Csv => writeln!(out, "{}", r.to_csv())?,
        }
    }
    Ok(())
}

fn io_failure(e: io::Error) -> Failure {
    if e.kind() == io::ErrorKind::BrokenPipe {
        // reader went away (e.g. `| head`); nothing left to report
        return Failure {
            code: EXIT_OK,
            message: String::new(),
        };
    }
    Failure {
        code: EXIT_UNWRITABLE,
        message: format!("cannot write output: {e}"),
    }
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = quadrature_spec(&a.function.tol)?;
    let target = Target::from_args(&a.function)?;
    let records = a
        .z
        .iter()
        .map(|&z| target.eval(z, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    emit_records(&records, a.function.format, out).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn coeff_table(a: &CoeffArgs, spec: &QuadratureSpec) -> Result<(SeriesCoeffs, bool), Failure> {
    if !(a.trunc_tol > 0.0 && a.trunc_tol < 1.0) {
        return Err(bad(format!("--trunc-tol must lie in (0, 1), got {}", a.trunc_tol)));
    }
    let max_index = |default: usize| a.max_s.or(a.max_nu.map(|v| 2 * v)).unwrap_or(default);
    match a.family {
        CoeffFamily::U => {
            let max_nu = a.max_nu.or(a.max_s.map(|s| s / 2)).unwrap_or(10);
            let u = PsiParams::u();
            let table = match a.provenance.unwrap_or(ProvenanceArg::ClosedForm) {
                ProvenanceArg::ClosedForm => u_series(max_nu, a.trunc_tol),
                ProvenanceArg::Residue => psi_series_residue(&u, 2 * max_nu, a.trunc_tol),
                ProvenanceArg::Recurrence => recurrence_from_residue(&u, 2 * max_nu.max(2), a.trunc_tol)?,
            };
            Ok((table, true))
        }
        CoeffFamily::Psi => {
            let n = a.n.ok_or_else(|| bad("--n is required for psi"))?;
            let k = a.k.ok_or_else(|| bad("--k is required for psi"))?;
            let p = PsiParams::new(n, k)?;
            let m = max_index(20);
            let table = match a.provenance.unwrap_or(ProvenanceArg::Residue) {
                ProvenanceArg::Residue => psi_series_residue(&p, m, a.trunc_tol),
                ProvenanceArg::Recurrence => recurrence_from_residue(&p, m.max(n), a.trunc_tol)?,
                ProvenanceArg::ClosedForm => return Err(bad("closed-form coefficients exist only for U")),
            };
            Ok((table, n % 2 == 0 && k % 2 == 1))
        }
        CoeffFamily::Phi => {
            let n = a.n.ok_or_else(|| bad("--n is required for phi"))?;
            let p = PhiParams::new(n, a.k.unwrap_or(1), a.b.unwrap_or_default())?;
            if !matches!(a.provenance, None | Some(ProvenanceArg::Recurrence)) {
                return Err(bad("phi coefficients come from the recurrence only"));
            }
            let seed: Vec<Complex64> = if p.b() == Complex64::new(0.0, 0.0) {
                (0..n).map(|s| Complex64::new(u_deriv_zero(n, s), 0.0)).collect()
            } else {
                (0..n)
                    .map(|s| Ok(phi_eval(&p, s, Complex64::new(0.0, 0.0), spec)?.value))
                    .collect::<Result<_, Error>>()?
            };
            let table = recurrence_extend(SeriesFamily::Phi(p), &seed, max_index(40).max(n))?;
            Ok((table, false))
        }
    }
}

fn recurrence_from_residue(p: &PsiParams, m_max: usize, tol: f64) -> Result<SeriesCoeffs, Failure> {
    let seed: Vec<Complex64> = (0..p.n())
        .map(|s| Complex64::new(crate::series::psi_deriv_zero_sum(p, s, tol), 0.0))
        .collect();
    Ok(recurrence_extend(SeriesFamily::Psi(*p), &seed, m_max.max(p.n()))?)
}

fn provenance_name(p: crate::series::Provenance) -> &'static str {
    use crate::series::Provenance::*;
    match p {
        ResidueSum => "residue_sum",
        ClosedFormU => "closed_form_U",
        Recurrence => "recurrence",
        QuadratureSeed => "quadrature_seed",
    }
}

fn cmd_coeffs(a: &CoeffArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = quadrature_spec(&a.tol)?;
    let (table, even_only) = coeff_table(a, &spec)?;
    let prov = provenance_name(table.provenance);
    let skip_odd = a.family == CoeffFamily::U && table.provenance != crate::series::Provenance::Recurrence;
    let mut text = String::new();
    if a.format == Format::Csv {
        text.push_str("index,coeff_re,coeff_im,log_abs,provenance\n");
    }
    for (m, (c, la)) in table.coeffs.iter().zip(&table.log_abs).enumerate() {
        if skip_odd && m % 2 == 1 {
            continue;
        }
        let la = if la.is_finite() { fmt_f64(*la) } else { "null".into() };
        match a.format {
            Format::Json => {
                let _ = writeln!(
                    text,
                    "{{\"index\":{m},\"coeff_re\":{},\"coeff_im\":{},\"log_abs\":{la},\"provenance\":\"{prov}\"}}",
                    fmt_f64(c.re),
                    fmt_f64(c.im)
                );
            }
            Format::Csv => {
                let la = if la == "null" { String::new() } else { la };
                let _ = writeln!(text, "{m},{},{},{la},{prov}", fmt_f64(c.re), fmt_f64(c.im));
            }
        }
    }
    if a.estimate {
        let est = order_type_estimate(&table, even_only)?;
        let line = format!(
            "{{\"rho_hat\":{},\"tau_hat\":{},\"nu_used\":{},\"rho_limsup\":{}}}",
            fmt_f64(est.rho_hat),
            fmt_f64(est.tau_hat),
            est.nu_used,
            fmt_f64(est.rho_limsup)
        );
        match a.format {
            Format::Json => {
                let _ = writeln!(text, "{line}");
            }
            Format::Csv => {
                let _ = writeln!(text, "# estimate {line}");
            }
        }
    }
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn override_params(
    id: &str,
    n: Option<usize>,
    k: Option<usize>,
    b: Option<Complex64>,
) -> Result<Option<PropertyParams>, Failure> {
    if n.is_none() && k.is_none() && b.is_none() {
        return Ok(None);
    }
    Ok(Some(match default_params(id)? {
        PropertyParams::Phi(d) => PropertyParams::Phi(PhiParams::new(
            n.unwrap_or(d.n()),
            k.unwrap_or(d.k()),
            b.unwrap_or(d.b()),
        )?),
        PropertyParams::Psi(d) => PropertyParams::Psi(PsiParams::new(n.unwrap_or(d.n()), k.unwrap_or(d.k()))?),
        PropertyParams::Order(d) => PropertyParams::Order(n.unwrap_or(d)),
        PropertyParams::Fixed if id == "wronskian_nonzero" => match n {
            Some(n) => PropertyParams::Order(n),
            None => PropertyParams::Fixed,
        },
        PropertyParams::Fixed => PropertyParams::Fixed,
    }))
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.list {
        let mut text = String::new();
        for (id, summary) in registered_properties() {
            let _ = writeln!(text, "{id}\t{summary}");
        }
        out.write_all(text.as_bytes()).map_err(io_failure)?;
        return Ok(EXIT_OK);
    }
    let spec = quadrature_spec(&a.tol)?;
    let ids: Vec<String> = if a.all || a.property.is_empty() {
        registered_properties().iter().map(|(id, _)| id.to_string()).collect()
    } else {
        a.property.clone()
    };
    // validate every id before running anything
    for id in &ids {
        default_params(id)?;
    }
    let mut all_passed = true;
    for id in &ids {
        let params = override_params(id, a.n, a.k, a.b)?;
        let report = run_property(id, params, &GridSpec::Default, &spec)?;
        all_passed &= report.passed;
        let line = serde_json::to_string(&report).map_err(|e| bad(e.to_string()))?;
        writeln!(out, "{line}").map_err(io_failure)?;
        out.flush().map_err(io_failure)?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// `from:to:step` → equally spaced values including both ends.
fn parse_range(s: &str, fields: usize) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad(format!("cannot parse range `{s}`")))?;
    if parts.len() != fields || parts.iter().any(|v| !v.is_finite()) {
        return Err(bad(format!("range `{s}` needs {fields} colon-separated numbers")));
    }
    Ok(parts)
}

fn steps(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0) || to < from {
        return Err(bad(format!("invalid range {from}:{to}:{step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(bad("range has too many points"));
    }
    Ok((0..count).map(|i| from + step * i as f64).collect())
}

fn scan_grid(a: &ScanArgs) -> Result<Vec<Complex64>, Failure> {
    let chosen = [a.ray.is_some(), a.circle.is_some(), a.rect.is_some()]
        .iter()
        .filter(|&&x| x)
        .count();
    if chosen != 1 {
        return Err(bad("choose exactly one of --ray, --circle, --rect"));
    }
    if let Some(theta) = a.ray {
        let r = a.r.as_deref().ok_or_else(|| bad("--ray needs --r from:to:step"))?;
        let v = parse_range(r, 3)?;
        if v[0] < 0.0 {
            return Err(bad("radii must be nonnegative"));
        }
        return Ok(steps(v[0], v[1], v[2])?
            .into_iter()
            .map(|r| Complex64::from_polar(r, theta))
            .collect());
    }
    if let Some(radius) = a.circle {
        if !(radius > 0.0) || a.points == 0 {
            return Err(bad("--circle needs a positive radius and --points > 0"));
        }
        let n = a.points;
        return Ok((0..n)
            .map(|j| Complex64::from_polar(radius, -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect());
    }
    let v = parse_range(a.rect.as_deref().unwrap_or_default(), 5)?;
    let xs = steps(v[0], v[1], v[4])?;
    let ys = steps(v[2], v[3], v[4])?;
    Ok(ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
        .collect())
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = quadrature_spec(&a.function.tol)?;
    let target = Target::from_args(&a.function)?;
    let grid = scan_grid(a)?;
    // open the destination before the (possibly long) evaluation
    let mut file = match &a.out {
        Some(path) => Some(BufWriter::new(File::create(path).map_err(io_failure)?)),
        None => None,
    };
    let records = grid
        .iter()
        .map(|&z| target.eval(z, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    match file.as_mut() {
        Some(f) => {
            emit_records(&records, a.function.format, f).map_err(io_failure)?;
            f.flush().map_err(io_failure)?;
        }
        None => emit_records(&records, a.function.format, out).map_err(io_failure)?,
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_ARGS } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Coeffs(a) => cmd_coeffs(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Scan(a) => cmd_scan(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(err, "error: {}", f.message);
            }
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["contour-odes"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("1+1i"), Ok(Complex64::new(1.0, 1.0)));
        assert_eq!(parse_complex("-0.5i"), Ok(Complex64::new(0.0, -0.5)));
        assert_eq!(parse_complex(" 2 "), Ok(Complex64::new(2.0, 0.0)));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn float_format_round_trips() {
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
    }

    #[test]
    fn ranges() {
        assert_eq!(steps(-2.0, 2.0, 0.25).unwrap().len(), 17);
        assert_eq!(steps(1.0, 10.0, 0.5).unwrap().len(), 19);
        assert!(steps(1.0, 0.0, 0.5).is_err());
        assert!(parse_range("1:2", 3).is_err());
    }

    #[test]
    fn eval_airy_at_origin() {
        let (code, out, _) = run_str(&["eval", "--family", "Ai", "--z", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"function_id\":\"Ai\""));
        assert!(out.contains("\"value_re\":3.55028053887817"), "{out}");
    }

    #[test]
    fn argument_errors() {
        assert_eq!(run_str(&["eval", "--family", "phi", "--z", "0"]).0, EXIT_BAD_ARGS);
        assert_eq!(run_str(&["eval", "--family", "nope", "--z", "0"]).0, EXIT_BAD_ARGS);
        assert_eq!(run_str(&["eval", "--family", "fj", "--n", "2", "--j", "4", "--z", "0"]).0, EXIT_BAD_ARGS);
        assert_eq!(run_str(&["verify", "--property", "nope"]).0, EXIT_BAD_ARGS);
    }

    #[test]
    fn nonconvergence_exit_code() {
        // exp(-1/(2w^2)) overflows on so small a circle
        let (code, _, err) = run_str(&["eval", "--family", "G", "--R", "0.01", "--z", "0"]);
        assert_eq!(code, EXIT_NONCONVERGENCE, "{err}");
    }
}
