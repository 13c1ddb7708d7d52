//! Command-line front end: `eval`, `scan`, `plot` and `selftest`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::coulomb::{CVariant, CoulombParams, Evaluation, FunctionName, Sign};
use crate::error::CoulombError;
use crate::render::{self, GridSpec, Plane, Target};
use crate::selftest;

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code for a numerical failure.
pub const EXIT_NUMERICAL: i32 = 1;
/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coulombx", version, about = "Coulomb wave functions for complex η, ℓ and ρ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one function at one point and print "re im".
    Eval(EvalArgs),
    /// Evaluate along a straight segment and stream CSV.
    Scan(ScanArgs),
    /// Render a phase plot as a P6 pixmap with a feature sidecar.
    Plot(PlotArgs),
    /// Run the invariant battery.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    #[value(alias = "a")]
    Sqrtgamma,
    #[value(alias = "b")]
    Euler,
    #[value(alias = "c")]
    Loggamma,
}

impl From<VariantArg> for CVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Sqrtgamma => CVariant::SqrtGamma,
            VariantArg::Euler => CVariant::EulerReflection,
            VariantArg::Loggamma => CVariant::LogGamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlaneArg {
    InverseEta,
    Rho,
}

/// Function selection and branch options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct FunctionArgs {
    /// F, G, Hp, Hm, Phi, Psi, I, C, w, h, g or theta.
    #[arg(long = "fn", value_parser = parse_function)]
    pub function: FunctionName,
    /// Construction of C.
    #[arg(long, value_enum, default_value = "loggamma")]
    pub variant: VariantArg,
    /// Sign for w±, h± and Φ: plus or minus.
    #[arg(long, value_parser = parse_sign, default_value = "plus", allow_hyphen_values = true)]
    pub sign: Sign,
    /// Sheet of the two-valued functions: 1 or -1.
    #[arg(long, value_parser = parse_sheet, default_value = "1", allow_hyphen_values = true)]
    pub sheet: i8,
    /// Winding n of ρ around the origin, for G.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub winding: i64,
}

impl FunctionArgs {
    fn evaluation(&self) -> Evaluation {
        Evaluation {
            function: self.function,
            variant: self.variant.into(),
            sign: self.sign,
            sheet_sign: self.sheet,
            winding: self.winding,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub ell: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub rho: Option<Complex64>,
    /// Wave number; with --r and --bohr replaces --eta and --rho.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with_all = ["eta", "rho"], requires = "bohr")]
    pub k: Option<Complex64>,
    /// Radius, in the length unit of --bohr.
    #[arg(long, allow_hyphen_values = true, requires = "k")]
    pub r: Option<f64>,
    /// Signed Bohr radius (negative for attraction).
    #[arg(long, allow_hyphen_values = true, requires = "k")]
    pub bohr: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub eta: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub ell: Complex64,
    /// Fixed ρ when scanning the inverse-η plane.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5")]
    pub rho: Complex64,
    /// Variable being scanned.
    #[arg(long, value_enum, default_value = "rho")]
    pub plane: PlaneArg,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub from: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub to: Complex64,
    /// Number of intervals; steps + 1 rows are written.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    /// Write the real-axis curves rho,F,G instead (real η, ℓ, ρ only).
    #[arg(long)]
    pub curves: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Fixed η when plotting the ρ plane.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub eta: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub ell: Complex64,
    /// Fixed ρ when plotting the inverse-η plane.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5")]
    pub rho: Complex64,
    #[arg(long, value_enum, default_value = "inverse-eta")]
    pub plane: PlaneArg,
    /// x0,y0,x1,y1
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-2,-2,2,2")]
    pub window: [f64; 4],
    /// N for an N×N image, or WxH.
    #[arg(long, value_parser = parse_size, default_value = "512")]
    pub size: (usize, usize),
    /// Output pixmap; the sidecar goes to <out>.points.txt.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_function(s: &str) -> Result<FunctionName, String> {
    s.parse()
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
        "-" | "minus" | "-1" => Ok(Sign::Minus),
        _ => Err(format!("invalid sign '{s}', expected plus or minus")),
    }
}

fn parse_sheet(s: &str) -> Result<i8, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("invalid sheet '{s}', expected 1 or -1")),
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let ok = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'));
    match s.parse::<f64>() {
        Ok(v) if ok && v.is_finite() => Ok(v),
        _ => Err(format!("malformed number '{s}'")),
    }
}

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i" with optional exponents.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let err = || format!("malformed complex literal '{s}', expected a+bi");
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(t).map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // The split is the last sign that is not the sign of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => parse_real(im_part).map_err(|_| err())?,
    };
    let re = if re_part.is_empty() { 0.0 } else { parse_real(re_part).map_err(|_| err())? };
    Ok(Complex64::new(re, im))
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("window '{s}' must be x0,y0,x1,y1"));
    }
    let mut w = [0.0; 4];
    for (slot, p) in w.iter_mut().zip(parts) {
        *slot = parse_real(p.trim())?;
    }
    if w[2] <= w[0] || w[3] <= w[1] {
        return Err(format!("window '{s}' needs x1 > x0 and y1 > y0"));
    }
    Ok(w)
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let dim = |p: &str| match p.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("invalid size '{s}', each side must be an integer >= 2")),
    };
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((dim(w)?, dim(h)?)),
        None => dim(s).map(|n| (n, n)),
    }
}

/// C `%.17g`: 17 significant digits, trailing zeros removed.
pub fn format_g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fail(err: &mut dyn Write, e: &CoulombError) -> i32 {
    let _ = writeln!(err, "error: {}: {e}", e.kind());
    EXIT_NUMERICAL
}

fn usage(err: &mut dyn Write, msg: &str) -> i32 {
    let _ = writeln!(err, "error: {msg}");
    EXIT_USAGE
}

/// Runs the CLI on `argv` (program name first) against stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run_with(argv, &mut out, &mut err)
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::Eval(a) => eval(&a, out, err),
        Command::Scan(a) => scan(&a, out, err),
        Command::Plot(a) => plot(&a, out, err),
        Command::Selftest => run_selftest(out),
    }
}

fn eval(a: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let function = a.function.function;
    let needs_rho = !function.ignores_rho();
    let params = if let Some(k) = a.k {
        let r = match (a.r, needs_rho) {
            (Some(r), _) => r,
            (None, false) => 0.0,
            (None, true) => return usage(err, &format!("--fn {function} needs --r")),
        };
        CoulombParams::from_physical(k, r, a.bohr.expect("clap enforces --bohr"), a.ell)
    } else {
        let Some(eta) = a.eta else {
            return usage(err, "either --eta or --k with --bohr is required");
        };
        let rho = match (a.rho, needs_rho) {
            (Some(rho), _) => rho,
            (None, false) => Complex64::new(0.0, 0.0),
            (None, true) => return usage(err, &format!("--fn {function} needs --rho")),
        };
        CoulombParams::new(eta, a.ell, rho)
    };
    let value = match params.and_then(|p| a.function.evaluation().evaluate(&p)) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => v,
        Ok(_) => return fail(err, &CoulombError::Overflow(function.as_str())),
        Err(e) => return fail(err, &e),
    };
    let _ = writeln!(out, "{} {}", format_g17(value.re), format_g17(value.im));
    EXIT_OK
}

fn scan(a: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let n = a.steps;
    let point = |i: u64| a.from + (a.to - a.from) * (i as f64 / n as f64);
    if a.curves {
        let real = |z: Complex64| z.im == 0.0;
        if !(real(a.eta) && real(a.ell) && real(a.from) && real(a.to)) {
            return usage(err, "--curves needs real --eta, --ell, --from and --to");
        }
        let rhos: Vec<f64> = (0..=n).map(|i| point(i).re).collect();
        return match render::curve_csv(a.eta.re, a.ell.re, &rhos) {
            Ok(csv) => {
                let _ = out.write_all(csv.as_bytes());
                EXIT_OK
            }
            Err(e) => fail(err, &e),
        };
    }
    let evaluation = a.function.evaluation();
    let (plane, name) = match a.plane {
        PlaneArg::Rho => (Plane::Rho, "rho"),
        PlaneArg::InverseEta => (Plane::InverseEta, "akb"),
    };
    let template = match CoulombParams::new(a.eta, a.ell, a.rho) {
        Ok(p) => p,
        Err(e) => return fail(err, &e),
    };
    let target = Target::Coulomb { evaluation, template };
    let _ = writeln!(out, "{name}_re,{name}_im,re,im");
    let mut failures = 0usize;
    for i in 0..=n {
        let z = point(i);
        let v = match target.sample(plane, z) {
            Ok(v) => v,
            Err(e) => {
                failures += 1;
                let _ = writeln!(err, "warning: {}: {e} at {name} = {} {}", e.kind(), format_g17(z.re), format_g17(z.im));
                Complex64::new(f64::NAN, f64::NAN)
            }
        };
        if writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, v.re, v.im).is_err() {
            return fail(err, &CoulombError::Io(std::io::Error::other("write to output failed")));
        }
    }
    if failures > 0 {
        let _ = writeln!(err, "{failures} of {} points failed", n + 1);
    }
    EXIT_OK
}

fn plot(a: &PlotArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let plane = match a.plane {
        PlaneArg::Rho => Plane::Rho,
        PlaneArg::InverseEta => Plane::InverseEta,
    };
    let (cols, rows) = a.size;
    let spec = match GridSpec::from_window(a.window, cols, rows, plane) {
        Ok(s) => s,
        Err(e) => return usage(err, &e.to_string()),
    };
    let template = match CoulombParams::new(a.eta, a.ell, a.rho) {
        Ok(p) => p,
        Err(e) => return fail(err, &e),
    };
    let target = Target::Coulomb { evaluation: a.function.evaluation(), template };
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.ppm", a.function.function)));
    let rendered = render::render_grid(&spec, &target);
    if let Err(e) = render::write_image(&rendered.image, &path) {
        return fail(err, &e);
    }
    let sidecar = render::sidecar_path(&path);
    if let Err(e) = std::fs::write(&sidecar, render::sidecar_text(&rendered.report)) {
        return fail(err, &CoulombError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", sidecar.display()))));
    }
    let _ = writeln!(out, "{}", path.display());
    let _ = writeln!(out, "{}", sidecar.display());
    let _ = writeln!(
        err,
        "{cols}x{rows}, {} features, {} failed pixels",
        rendered.report.features.len(),
        rendered.report.failures
    );
    EXIT_OK
}

fn run_selftest(out: &mut dyn Write) -> i32 {
    let outcomes = selftest::run_all();
    let mut failed = 0;
    for o in &outcomes {
        match &o.result {
            Ok(()) => {
                let _ = writeln!(out, "PASS {}", o.name);
            }
            Err(msg) => {
                failed += 1;
                let _ = writeln!(out, "FAIL {}: {msg}", o.name);
            }
        }
    }
    let _ = writeln!(out, "{} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}
