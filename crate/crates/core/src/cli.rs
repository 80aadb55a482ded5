//! Command-line front end. Exit codes: 0 success, 1 computational or
//! diagnostic failure, 2 usage error.

use crate::error::{Error, Result};
use crate::factorization::{classical_mask, refinement_mask, DEFAULT_GRID};
use crate::filterbank::{
    analyze_1d, analyze_2d_at, synthesize_1d, synthesize_2d, threshold_denoise, threshold_denoise_2d,
    FilterBankPlan, ThresholdMode,
};
use crate::image::{encode_pgm, parse_pgm, PgmEncoding};
use crate::io::{self, CoefficientFile, PyramidFile};
use crate::subdivision::{
    cascade_father, fundamental_function, mother_wavelet, refinement_residual,
    reproduction_error,
};
use crate::symbols::{
    a_symbol, bezout_residual, bezout_solve, polyharmonic_p, q_polynomial_closed_form, verify_symbol,
    FrequencyVector, SymbolContext,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const GRID_ENV: &str = "POLYWAVE_GRID";

#[derive(Parser, Debug)]
#[command(name = "polywave", version, about = "Non-stationary polyharmonic wavelets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the subdivision symbol and refinement mask as JSON.
    Filters(FilterArgs),
    /// Run the invariant suite for one (N, ξ, level).
    Verify(VerifyArgs),
    /// Tabulate Φ_m, φ_m and ψ_m as CSV.
    Cascade(CascadeArgs),
    /// Wavelet coefficients of a CSV signal or PGM image.
    Analyze(AnalyzeArgs),
    /// Reconstruct a signal or image from coefficient JSON.
    Synthesize(IoArgs),
    /// Analyze, threshold details, synthesize.
    Denoise(DenoiseArgs),
}

#[derive(Args, Debug, Clone)]
struct FilterArgs {
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..=10))]
    order: u32,
    #[arg(long, default_value_t = 0.0, value_parser = parse_xi)]
    xi: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=30))]
    level: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..=10), required_unless_present = "check_file")]
    order: Option<u32>,
    #[arg(long, default_value_t = 0.0, value_parser = parse_xi)]
    xi: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=30))]
    level: u32,
    /// Cascade depth for the tabulation checks.
    #[arg(long = "L", default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=16))]
    depth: u32,
    /// Filter JSON (as written by `filters`) to check instead of recomputing.
    #[arg(long)]
    check_file: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CascadeArgs {
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..=10))]
    order: u32,
    #[arg(long, default_value_t = 0.0, value_parser = parse_xi)]
    xi: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=30))]
    level: u32,
    #[arg(long = "L", default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=16))]
    depth: u32,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long = "N", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=10))]
    order: u32,
    /// Ignored for images, where every row frequency uses its own ξ.
    #[arg(long, default_value_t = 0.0, value_parser = parse_xi)]
    xi: f64,
    #[arg(long = "depth", short = 'J', default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=30))]
    depth: u32,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=30))]
    base_level: u32,
}

#[derive(Args, Debug)]
struct IoArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    transform: TransformArgs,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    transform: TransformArgs,
    #[arg(long, value_parser = parse_tau)]
    tau: f64,
    #[arg(long, default_value = "soft", value_parser = parse_mode)]
    mode: ThresholdMode,
}

fn parse_xi(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(format!("ξ must be a finite number >= 0, got {s:?}")),
    }
}

fn parse_tau(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 => Ok(x),
        _ => Err(format!("τ must be >= 0, got {s:?}")),
    }
}

fn parse_mode(s: &str) -> std::result::Result<ThresholdMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Compute(Error),
    Diagnostics,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Diagnostics) => 1,
    }
}

fn grid_size() -> std::result::Result<usize, Failure> {
    match std::env::var(GRID_ENV) {
        Err(_) => Ok(DEFAULT_GRID),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 8 => Ok(n),
            _ => Err(Failure::Usage(format!("{GRID_ENV} must be an integer >= 8, got {s:?}"))),
        },
    }
}

fn dispatch(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Filters(a) => cmd_filters(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Cascade(a) => cmd_cascade(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Synthesize(a) => cmd_synthesize(&a),
        Command::Denoise(a) => cmd_denoise(&a),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| io_error(p, e)),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| io_error(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).map_err(|_| Error::parse(path.display().to_string(), "not UTF-8 text"))
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

fn cmd_filters(a: &FilterArgs) -> std::result::Result<(), Failure> {
    let grid = grid_size()?;
    let ctx = SymbolContext::new(a.order as usize, a.xi, a.level)?;
    let (value, passed) = filters_json(&ctx, grid)?;
    emit(a.out.as_deref(), io::to_pretty(&value).as_bytes())?;
    if passed {
        Ok(())
    } else {
        eprintln!("error: filter diagnostics exceed tolerance");
        Err(Failure::Diagnostics)
    }
}

/// Symbol, mask and diagnostics for one context, and whether all
/// diagnostics pass.
pub fn filters_json(ctx: &SymbolContext, grid: usize) -> Result<(Value, bool)> {
    let symbol = a_symbol(ctx);
    let mask = refinement_mask(ctx)?;
    let diag = mask.diagnostics(grid);
    let report = verify_symbol(&symbol, grid);
    let bezout = bezout_residual(&polyharmonic_p(ctx), &q_polynomial_closed_form(ctx), 200);
    let passed = diag.passes() && report.passes() && bezout <= 1e-10;
    let value = json!({
        "symbol": io::symbol_json(&symbol),
        "mask": io::mask_json(&mask, diag.factorization_residual),
        "diagnostics": {
            "qmf_residual": io::number(diag.qmf_residual),
            "factorization_residual": io::number(diag.factorization_residual),
            "complementarity_residual": io::number(diag.complementarity_residual),
            "bezout_residual": io::number(bezout),
            "min_circle_value": io::number(report.min_circle_value),
            "symmetry_defect": io::number(report.symmetry_defect),
            "interpolatory_defect": io::number(report.interpolatory_defect),
            "passed": passed,
        },
    });
    Ok((value, passed))
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `true` when the value must not exceed the tolerance; `false` when it
    /// must not fall below it.
    pub upper: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            upper: true,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            upper: false,
        }
    }

    pub fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.tolerance
        } else {
            self.value >= self.tolerance
        }
    }
}

/// The invariant suite for `(N, ξ, level)` with tabulation depth `depth`.
pub fn verification_report(order: usize, xi: f64, level: u32, depth: u32, grid: usize) -> Result<Vec<Check>> {
    let ctx = SymbolContext::new(order, xi, level)?;
    let mut checks = Vec::new();

    let p = polyharmonic_p(&ctx);
    let q = q_polynomial_closed_form(&ctx);
    checks.push(Check::at_most("bezout_residual", bezout_residual(&p, &q, 200), 1e-10));
    checks.push(Check::at_most(
        "closed_form_vs_solve",
        q.relative_distance(&bezout_solve(&p)?),
        1e-9,
    ));

    let symbol = a_symbol(&ctx);
    let report = verify_symbol(&symbol, grid);
    checks.push(Check::at_most("symbol_symmetry_defect", report.symmetry_defect, 1e-10));
    checks.push(Check::at_least("symbol_min_circle_value", report.min_circle_value, -1e-12));
    checks.push(Check::at_most("symbol_interpolatory_defect", report.interpolatory_defect, 1e-10));

    let mask = refinement_mask(&ctx)?;
    let diag = mask.diagnostics(grid);
    checks.push(Check::at_most("mask_qmf_residual", diag.qmf_residual, 1e-9));
    checks.push(Check::at_most("mask_factorization_residual", diag.factorization_residual, 1e-9));
    checks.push(Check::at_most("mask_complementarity_residual", diag.complementarity_residual, 1e-9));
    if xi == 0.0 {
        let classical = classical_mask(order)?;
        checks.push(Check::at_most("classical_limit_match", mask.g.max_abs_diff(&classical), 1e-9));
    }

    let lams = FrequencyVector::polyharmonic(order, xi)?;
    let signs: &[i8] = if xi == 0.0 { &[1] } else { &[1, -1] };
    for l in 0..order as u32 {
        for &s in signs {
            let err = reproduction_error(&lams, &[l], &[s], level, 4)?;
            let sign = if s > 0 { "+" } else { "-" };
            checks.push(Check::at_most(format!("reproduction_t^{l}e^({sign}xi t)"), err, 1e-9));
        }
    }
    let big_phi = fundamental_function(order, xi, level, depth)?;
    let big_phi_next = fundamental_function(order, xi, level + 1, depth)?;
    let per = big_phi.points_per_unit();
    let delta_defect = (-(2 * order as i64)..=2 * order as i64)
        .map(|j| (big_phi.at(j * per) - if j == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("fundamental_integer_delta", delta_defect, 0.0));
    checks.push(Check::at_most(
        "fundamental_refinement_residual",
        refinement_residual(&big_phi, &big_phi_next, &symbol.a),
        1e-8,
    ));

    let phi = cascade_father(order, xi, level, depth)?;
    let phi_next = cascade_father(order, xi, level + 1, depth)?;
    checks.push(Check::at_most(
        "father_refinement_residual",
        refinement_residual(&phi, &phi_next, &mask.g),
        1e-8,
    ));
    let gram = phi.gram(-3..=3);
    let gram_defect = gram
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (v - if i == j { 1.0 } else { 0.0 }).abs()))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("father_gram_defect", gram_defect, 1e-5));
    let auto_defect = (-3..=3i64)
        .map(|k| (phi.shifted_inner(&phi, k) - big_phi.at(k * per)).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("autocorrelation_defect", auto_defect, 1e-5));

    let psi = mother_wavelet(order, xi, level, depth)?;
    let psi_self = (-3..=3i64)
        .map(|k| (psi.shifted_inner(&psi, k) - if k == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("mother_orthonormality_defect", psi_self, 1e-5));
    let psi_phi = (-3..=3i64).map(|k| psi.shifted_inner(&phi, k).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("mother_father_orthogonality", psi_phi, 1e-6));
    let h_gain = mask.highpass().eval_circle(0.0).re / 2.0;
    let father_next = cascade_father(order, xi, level + 1, depth - 1).ok();
    let expected = father_next.map_or(0.0, |f| h_gain * f.riemann_sum());
    checks.push(Check::at_most(
        "mother_integral_defect",
        (psi.riemann_sum() - expected).abs(),
        1e-6,
    ));
    Ok(checks)
}

/// Checks a filter file against freshly computed symbol and mask.
pub fn check_filter_file(text: &str, grid: usize) -> Result<Vec<Check>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("json", e.to_string()))?;
    let mask_value = v.get("mask").unwrap_or(&v);
    let mask = io::parse_laurent_record(mask_value)?;
    if mask.order == 0 || mask.order > 10 {
        return Err(Error::parse("N", format!("{} outside 1..=10", mask.order)));
    }
    let ctx = SymbolContext::new(mask.order, mask.xi, mask.level)?;
    let symbol = a_symbol(&ctx);
    let reference = refinement_mask(&ctx)?;
    let mut checks = vec![
        Check::at_most("file_mask_qmf_residual", crate::factorization::qmf_residual(&mask.poly), 1e-9),
        Check::at_most(
            "file_mask_factorization_residual",
            crate::factorization::factorization_residual(&mask.poly, &symbol.a, grid),
            1e-9,
        ),
        Check::at_most("file_mask_vs_recomputed", mask.poly.max_abs_diff(&reference.g), 1e-9),
    ];
    if let Some(sv) = v.get("symbol") {
        let s = io::parse_laurent_record(sv)?;
        checks.push(Check::at_most("file_symbol_vs_recomputed", s.poly.max_abs_diff(&symbol.a), 1e-10));
    }
    Ok(checks)
}

fn cmd_verify(a: &VerifyArgs) -> std::result::Result<(), Failure> {
    let grid = grid_size()?;
    let (checks, header) = match &a.check_file {
        Some(path) => (check_filter_file(&read_text(path)?, grid)?, format!("file {}", path.display())),
        None => {
            let order = a.order.expect("required by clap") as usize;
            (
                verification_report(order, a.xi, a.level, a.depth, grid)?,
                format!("N={order} xi={} level={} L={}", a.xi, a.level, a.depth),
            )
        }
    };
    let passed = checks.iter().all(Check::passed);
    let mut text = format!("verify {header}\n");
    for c in &checks {
        let op = if c.upper { "<=" } else { ">=" };
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{status} {:<34} {:>12.3e} {op} {:.0e}", c.name, c.value, c.tolerance);
    }
    let _ = writeln!(text, "{}", if passed { "all checks passed" } else { "some checks failed" });
    emit(None, text.as_bytes())?;
    if let Some(out) = &a.out {
        let report = json!({
            "passed": passed,
            "checks": checks.iter().map(|c| json!({
                "name": c.name,
                "value": io::number(c.value),
                "tolerance": io::number(c.tolerance),
                "bound": if c.upper { "upper" } else { "lower" },
                "passed": c.passed(),
            })).collect::<Vec<_>>(),
        });
        emit(Some(out), io::to_pretty(&report).as_bytes())?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Diagnostics)
    }
}

fn cmd_cascade(a: &CascadeArgs) -> std::result::Result<(), Failure> {
    let n = a.order as usize;
    fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    let tables = [
        ("fundamental.csv", fundamental_function(n, a.xi, a.level, a.depth)?),
        ("father.csv", cascade_father(n, a.xi, a.level, a.depth)?),
        ("mother.csv", mother_wavelet(n, a.xi, a.level, a.depth)?),
    ];
    for (name, table) in &tables {
        emit(Some(&a.out.join(name)), table.to_csv().as_bytes())?;
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> std::result::Result<(), Failure> {
    let t = &a.transform;
    let value = if is_pgm(&a.io.input) {
        let pgm = parse_pgm(&read(&a.io.input)?)?;
        let coeffs = analyze_2d_at(&pgm.image, t.order as usize, t.base_level, t.depth)?;
        io::spectral_json(&coeffs, pgm.maxval)
    } else {
        let signal = io::parse_signal_csv(&read_text(&a.io.input)?)?;
        let plan = FilterBankPlan::new(t.order as usize, t.xi, t.base_level, t.depth)?;
        io::pyramid_json(&PyramidFile {
            order: plan.order(),
            xi: t.xi,
            base_level: t.base_level,
            pyramid: analyze_1d(&signal, &plan)?,
        })
    };
    emit(a.io.out.as_deref(), io::to_pretty(&value).as_bytes())?;
    Ok(())
}

fn cmd_synthesize(a: &IoArgs) -> std::result::Result<(), Failure> {
    match io::parse_coefficients(&read_text(&a.input)?)? {
        CoefficientFile::Signal(f) => {
            let plan = FilterBankPlan::new(f.order, f.xi, f.base_level, f.pyramid.depth())?;
            let x = synthesize_1d(&f.pyramid, &plan)?;
            emit(a.out.as_deref(), io::signal_csv(&x).as_bytes())?;
        }
        CoefficientFile::Image { pyramid, maxval } => {
            let img = synthesize_2d(&pyramid)?;
            emit(a.out.as_deref(), &encode_pgm(&img, maxval, PgmEncoding::Binary))?;
        }
    }
    Ok(())
}

fn cmd_denoise(a: &DenoiseArgs) -> std::result::Result<(), Failure> {
    let t = &a.transform;
    if is_pgm(&a.io.input) {
        let pgm = parse_pgm(&read(&a.io.input)?)?;
        let coeffs = analyze_2d_at(&pgm.image, t.order as usize, t.base_level, t.depth)?;
        let img = synthesize_2d(&threshold_denoise_2d(&coeffs, a.tau, a.mode)?)?;
        emit(a.io.out.as_deref(), &encode_pgm(&img, pgm.maxval, pgm.encoding))?;
    } else {
        let signal = io::parse_signal_csv(&read_text(&a.io.input)?)?;
        let plan = FilterBankPlan::new(t.order as usize, t.xi, t.base_level, t.depth)?;
        let pyr = threshold_denoise(&analyze_1d(&signal, &plan)?, a.tau, a.mode)?;
        emit(a.io.out.as_deref(), io::signal_csv(&synthesize_1d(&pyr, &plan)?).as_bytes())?;
    }
    Ok(())
}
