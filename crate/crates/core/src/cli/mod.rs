//! `capture-rg`: command-line access to the exact series, the closed-form
//! solutions and the numerical oracle.
//!
//! Every subcommand writes one table to `--out` (stdout by default) as CSV or
//! JSON. CSV output starts with a `# config: {...}` line holding the parsed
//! invocation; JSON output holds it under `"config"`. Failures are reported on
//! stderr as a JSON object `{"error": kind, "message": ..., ...}`.

mod dataset;
mod render;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::closed_form::{self, Branch, InitialConditions};
use crate::coefficients::CoefficientTable;
use crate::critical::{CriticalSeries, TABLE_ROWS};
use crate::domb_sykes;
use crate::error::Error;
use crate::oracle::{self, IntegratorConfig, PortraitGrid};
use crate::rational::{self, Rational};
use crate::separatrix::SeparatrixExpansion;

use render::{Cell, Output, Table};

pub use render::{format_float, sci};

/// Environment variable supplying the default for `--float-digits`.
pub const FLOAT_DIGITS_ENV: &str = "CAPTURE_RG_FLOAT_DIGITS";

#[derive(Parser, Debug, Serialize)]
#[command(name = "capture-rg", version, about = "Series, closed-form and numerical solutions of x'' + x' + eps x^2 = 0")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Precision for inexact columns.
    #[arg(long, env = FLOAT_DIGITS_ENV, global = true)]
    pub float_digits: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Separatrix coefficients B_n (exact) and b_n = n!(n+1)! B_n.
    Coeffs(CoeffsArgs),
    /// Partial sums of the critical-point series.
    Critical(CriticalArgs),
    /// Successive term ratios of the critical-point series.
    CriticalTerms(OrderArgs),
    /// Truncated separatrix series x_k(z), u_k(z) on a grid of z.
    Separatrix(SeparatrixArgs),
    /// Composite or RG closed-form trajectory.
    Solution(SolutionArgs),
    /// Numerical fate of one initial condition.
    Fate(FateArgs),
    /// Backward numerical trace of the separatrix to the nullcline.
    TraceSeparatrix(TraceArgs),
    /// Bisection for the critical release point on u0 = -x0^2.
    FindXc(FindXcArgs),
    /// Fates on a grid of initial conditions.
    Portrait(PortraitArgs),
    /// Domb-Sykes analysis of the separatrix coefficients.
    DombSykes(DombSykesArgs),
    /// Write the CSV files behind one figure into a directory.
    Dataset(dataset::DatasetArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CoeffsArgs {
    /// Number of coefficients, B_0..B_{count-1}.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct CriticalArgs {
    #[arg(long, default_value_t = 30)]
    pub order: usize,
    /// Comma-separated truncation orders (default: the standard table rows up to --order).
    #[arg(long, value_delimiter = ',')]
    pub rows: Option<Vec<usize>>,
}

#[derive(Args, Debug, Serialize)]
pub struct OrderArgs {
    #[arg(long, default_value_t = 30)]
    pub order: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SeparatrixArgs {
    /// Largest truncation; column pair k keeps terms through z^k.
    #[arg(long, default_value_t = 5)]
    pub max_order: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub z_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub z_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Exact value, e.g. 1, 1/2 or 0.25.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Matched,
    Rg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SolutionArgs {
    #[arg(long, value_enum, default_value_t = Method::Rg)]
    pub method: Method,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    /// Initial velocity (default: -x0^2, zero initial acceleration).
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    pub branch: BranchArg,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct IntegratorArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Integration time budget.
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.5)]
    pub max_step: f64,
}

impl IntegratorArgs {
    fn config(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            t_max: self.horizon,
            max_step: self.max_step,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    /// Initial velocity (default: -x0^2).
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    /// Emit the sampled trajectory instead of the summary row.
    #[arg(long)]
    pub trajectory: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    /// Emit the traced polyline instead of the summary row.
    #[arg(long)]
    pub polyline: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FindXcArgs {
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
}

/// `LO:HI`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Range(parse(lo)?, parse(hi)?))
    }
}

/// `N` or `NXxNU`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution(pub usize, pub usize);

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        match s.split_once('x') {
            Some((nx, nu)) => Ok(Resolution(parse(nx)?, parse(nu)?)),
            None => {
                let n = parse(s)?;
                Ok(Resolution(n, n))
            }
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct PortraitArgs {
    #[arg(long, default_value = "-0.2:1.2", allow_hyphen_values = true)]
    pub x_range: Range,
    #[arg(long, default_value = "-1.2:0.4", allow_hyphen_values = true)]
    pub u_range: Range,
    #[arg(long, default_value = "41")]
    pub resolution: Resolution,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
}

/// `LO:HI` over integer indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window(pub usize, pub usize);

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Window(parse(lo)?, parse(hi)?))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DombSykesArgs {
    /// Number of coefficients, B_0..B_{count-1}.
    #[arg(long, default_value_t = 40)]
    pub count: usize,
    /// Fit window LO:HI (default: last half of the available indices).
    #[arg(long)]
    pub window: Option<Window>,
    /// Offset used in the growth fit (default: the fitted one).
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
}

/// A failure, as reported on stderr.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub details: Map<String, Value>,
    pub exit_code: i32,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            details: Map::new(),
            exit_code: 1,
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into()).into()
    }

    pub fn to_json(&self) -> Value {
        let mut object = Map::new();
        object.insert("error".into(), json!(self.kind));
        object.insert("message".into(), json!(self.message));
        object.extend(self.details.clone());
        Value::Object(object)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let details = match &e {
            Error::Breakdown {
                x0,
                u0,
                discriminant,
                limit,
            } => json!({
                "x0": x0,
                "u0": u0,
                "discriminant": discriminant,
                "condition": "u0 <= (1 - 4*x0)/4",
                "u0_limit": limit,
            }),
            Error::Pole { t } => json!({ "t": t }),
            Error::Stiffness { t, x, u } => json!({ "t": t, "x": x, "u": u }),
            Error::TraceIncomplete { t } => json!({ "t": t }),
            Error::Bracket { lo, hi, fate } => json!({ "lo": lo, "hi": hi, "fates": fate }),
            Error::Undecided { x0, u0, t_max } => json!({ "x0": x0, "u0": u0, "t_max": t_max }),
            Error::RowOutOfRange { row, max } => json!({ "row": row, "max": max }),
            Error::SolverDegenerate { order } => json!({ "order": order }),
            _ => json!({}),
        };
        let Value::Object(details) = details else {
            unreachable!("details are always objects")
        };
        Self {
            kind: e.kind(),
            message: e.to_string(),
            details,
            exit_code: 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

/// Runs the CLI against the process's stdout and stderr. Returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit streams.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let err = CliError {
                exit_code: 2,
                ..CliError::new("usage", e.render().to_string().trim_end())
            };
            let _ = writeln!(stderr, "{}", err.to_json());
            return 2;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_json());
            err.exit_code
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    validate(cli)?;
    let config = serde_json::to_value(cli)?;
    if let Command::Dataset(args) = &cli.command {
        let listing = dataset::emit(args, &config, cli.float_digits)?;
        return write_to(cli, stdout, &listing.into(), &config);
    }
    let output = match &cli.command {
        Command::Coeffs(a) => coeffs(a, cli.float_digits)?,
        Command::Critical(a) => critical(a, cli.float_digits)?,
        Command::CriticalTerms(a) => critical_terms(a.order)?.into(),
        Command::Separatrix(a) => separatrix(a)?,
        Command::Solution(a) => solution(a)?,
        Command::Fate(a) => fate(a)?,
        Command::TraceSeparatrix(a) => trace(a)?,
        Command::FindXc(a) => find_xc(a)?,
        Command::Portrait(a) => portrait(a)?,
        Command::DombSykes(a) => domb_sykes_cmd(a)?,
        Command::Dataset(_) => unreachable!("handled above"),
    };
    write_to(cli, stdout, &output, &config)
}

fn write_to(cli: &Cli, stdout: &mut dyn Write, output: &Output, config: &Value) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            render::write_output(&mut file, output, config, cli.format, cli.float_digits)?;
            file.flush()?;
        }
        None => render::write_output(stdout, output, config, cli.format, cli.float_digits)?,
    }
    Ok(())
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(format!("--{name} must be positive, got {value}")))
    }
}

fn finite(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(format!("--{name} must be finite, got {value}")))
    }
}

fn at_least(name: &str, value: usize, min: usize) -> Result<(), CliError> {
    if value >= min {
        Ok(())
    } else {
        Err(CliError::invalid(format!("--{name} must be at least {min}, got {value}")))
    }
}

fn ordered(name: &str, lo: f64, hi: f64) -> Result<(), CliError> {
    finite(name, lo)?;
    finite(name, hi)?;
    if lo < hi {
        Ok(())
    } else {
        Err(CliError::invalid(format!("--{name} needs LO < HI, got {lo}:{hi}")))
    }
}

fn validate_integrator(a: &IntegratorArgs) -> Result<(), CliError> {
    positive("rel-tol", a.rel_tol)?;
    positive("abs-tol", a.abs_tol)?;
    positive("horizon", a.horizon)?;
    positive("max-step", a.max_step)
}

/// Range checks on every numeric parameter, before any work starts.
fn validate(cli: &Cli) -> Result<(), CliError> {
    if let Some(d) = cli.float_digits {
        if d > 30 {
            return Err(CliError::invalid(format!("--float-digits must be at most 30, got {d}")));
        }
    }
    match &cli.command {
        Command::Coeffs(a) => at_least("count", a.count, 1),
        Command::Critical(a) => {
            at_least("order", a.order, 1)?;
            if let Some(rows) = &a.rows {
                if rows.is_empty() {
                    return Err(CliError::invalid("--rows is empty"));
                }
                for &r in rows {
                    if r == 0 || r > a.order {
                        return Err(Error::RowOutOfRange { row: r, max: a.order }.into());
                    }
                }
            }
            Ok(())
        }
        Command::CriticalTerms(a) => at_least("order", a.order, 2),
        Command::Separatrix(a) => {
            at_least("max-order", a.max_order, 1)?;
            at_least("points", a.points, 2)?;
            ordered("z-min/--z-max", a.z_min, a.z_max)?;
            rational::parse_rational(&a.epsilon)?;
            Ok(())
        }
        Command::Solution(a) => {
            finite("x0", a.x0)?;
            if let Some(u0) = a.u0 {
                finite("u0", u0)?;
            }
            positive("epsilon", a.epsilon)?;
            positive("t-max", a.t_max)?;
            at_least("points", a.points, 2)
        }
        Command::Fate(a) => {
            finite("x0", a.x0)?;
            if let Some(u0) = a.u0 {
                finite("u0", u0)?;
            }
            validate_integrator(&a.integrator)
        }
        Command::TraceSeparatrix(a) => {
            positive("delta", a.delta)?;
            validate_integrator(&a.integrator)
        }
        Command::FindXc(a) => {
            positive("tol", a.tol)?;
            ordered("lo/--hi", a.lo, a.hi)?;
            validate_integrator(&a.integrator)
        }
        Command::Portrait(a) => {
            ordered("x-range", a.x_range.0, a.x_range.1)?;
            ordered("u-range", a.u_range.0, a.u_range.1)?;
            at_least("resolution", a.resolution.0.min(a.resolution.1), 2)?;
            validate_integrator(&a.integrator)
        }
        Command::DombSykes(a) => {
            at_least("count", a.count, 3)?;
            if let Some(d) = a.delta {
                finite("delta", d)?;
            }
            Ok(())
        }
        Command::Dataset(a) => a.validate(),
    }
}

fn coeffs(a: &CoeffsArgs, digits: Option<usize>) -> Result<Output, CliError> {
    let table = CoefficientTable::generate(a.count - 1);
    let b_int = table.integer_b()?;
    let mut columns = vec!["n", "B_n", "b_n"];
    if digits.is_some() {
        columns.push("B_n_float");
    }
    let mut out = Table::new(columns);
    for (n, (b, bi)) in table.coeffs().iter().zip(b_int).enumerate() {
        let mut row = vec![Cell::Index(n), Cell::Exact(b.clone()), Cell::Integer(bi)];
        if digits.is_some() {
            row.push(Cell::Float(rational::to_f64(b)));
        }
        out.push(row);
    }
    Ok(out.into())
}

fn critical(a: &CriticalArgs, digits: Option<usize>) -> Result<Output, CliError> {
    let rows: Vec<usize> = match &a.rows {
        Some(rows) => rows.clone(),
        None => TABLE_ROWS.iter().copied().filter(|&n| n <= a.order).collect(),
    };
    let table = CoefficientTable::generate(a.order);
    let series = CriticalSeries::compute(a.order, &table)?;
    let decimals = digits.unwrap_or(8);
    let mut out = Table::new([
        "n",
        "zc_sum",
        "zc_term",
        "xc_sum",
        "xc_term",
        "zc_sum_exact",
        "zc_term_exact",
        "xc_sum_exact",
        "xc_term_exact",
    ]);
    for row in series.partial_sum_table(&rows)? {
        out.push(vec![
            Cell::Index(row.n),
            Cell::Fixed(row.zc_sum.clone(), decimals),
            Cell::Sci(rational::to_f64(&row.zc_term), 4),
            Cell::Fixed(row.xc_sum.clone(), decimals),
            Cell::Sci(rational::to_f64(&row.xc_term), 4),
            Cell::Exact(row.zc_sum),
            Cell::Exact(row.zc_term),
            Cell::Exact(row.xc_sum),
            Cell::Exact(row.xc_term),
        ]);
    }
    Ok(out.into())
}

fn ratio_cell(r: Option<f64>) -> Cell {
    r.map_or(Cell::Missing, Cell::Float)
}

fn band_cell(r: Option<f64>) -> Cell {
    r.map_or(Cell::Missing, |v| Cell::Flag(v < 1.0))
}

pub(crate) fn critical_terms(order: usize) -> Result<Table, CliError> {
    let series = CriticalSeries::compute(order, &CoefficientTable::generate(order))?;
    let mut out = Table::new(["n", "zc_ratio", "xc_ratio", "zc_in_band", "xc_in_band"]);
    for r in series.term_ratios() {
        out.push(vec![
            Cell::Index(r.n),
            ratio_cell(r.zc),
            ratio_cell(r.xc),
            band_cell(r.zc),
            band_cell(r.xc),
        ]);
    }
    Ok(out)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

pub(crate) fn separatrix_family(
    max_order: usize,
    epsilon: Rational,
    z_range: (f64, f64),
    points: usize,
) -> Result<Table, CliError> {
    // Truncation k keeps z^1..z^k, i.e. B_0..B_{k-1}.
    let table = CoefficientTable::generate(max_order - 1);
    let expansion = SeparatrixExpansion::with_table(table, epsilon, max_order - 1)?;
    let mut columns = vec!["z".to_string()];
    for k in 1..=max_order {
        columns.push(format!("x_{k}"));
        columns.push(format!("u_{k}"));
    }
    let mut out = Table::new(columns);
    for z in linspace(z_range.0, z_range.1, points) {
        let exact = rational::from_f64(z)?;
        let mut row = vec![Cell::Float(z)];
        for (x, u) in expansion.partial_evals(&exact) {
            row.push(Cell::Float(rational::to_f64(&x)));
            row.push(Cell::Float(rational::to_f64(&u)));
        }
        out.push(row);
    }
    Ok(out)
}

fn separatrix(a: &SeparatrixArgs) -> Result<Output, CliError> {
    let eps = rational::parse_rational(&a.epsilon)?;
    Ok(separatrix_family(a.max_order, eps, (a.z_min, a.z_max), a.points)?.into())
}

fn solution(a: &SolutionArgs) -> Result<Output, CliError> {
    let ic = InitialConditions::new(a.x0, a.u0.unwrap_or(-a.x0 * a.x0));
    let constants = closed_form::constants_from_ic(ic, a.epsilon, a.branch.into())?;
    let mut out = Table::new(["t", "x", "u"]);
    for t in linspace(0.0, a.t_max, a.points) {
        let (x, u) = match a.method {
            Method::Matched => closed_form::matched_state(&constants, t)?,
            Method::Rg => closed_form::rg_state(&constants, t)?,
        };
        out.push(vec![Cell::Float(t), Cell::Float(x), Cell::Float(u)]);
    }
    let json = json!({ "constants": constants, "trajectory": out_rows(&out) });
    Ok(Output {
        table: out,
        json: Some(json),
        summary: None,
    })
}

fn out_rows(table: &Table) -> Value {
    // Plain numeric triples; every cell here is a float.
    Value::Array(
        table
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Cell::Float(v) => Value::from(*v),
                            _ => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn fate(a: &FateArgs) -> Result<Output, CliError> {
    let ic = InitialConditions::new(a.x0, a.u0.unwrap_or(-a.x0 * a.x0));
    let cfg = IntegratorConfig {
        record_trajectory: a.trajectory,
        ..a.integrator.config()
    };
    let result = oracle::classify_fate(ic, &cfg)?;
    let summary = json!({
        "x0": ic.x0,
        "u0": ic.u0,
        "fate": result.fate.as_str(),
        "t_event": result.t_event,
    });
    let table = match &result.trajectory {
        Some(path) => {
            let mut t = Table::new(["t", "x", "u"]);
            for s in path {
                t.push(vec![Cell::Float(s.t), Cell::Float(s.x), Cell::Float(s.u)]);
            }
            t
        }
        None => {
            let mut t = Table::new(["x0", "u0", "fate", "t_event"]);
            t.push(vec![
                Cell::Float(ic.x0),
                Cell::Float(ic.u0),
                Cell::Text(result.fate.as_str().into()),
                Cell::Float(result.t_event),
            ]);
            t
        }
    };
    let json = match &result.trajectory {
        Some(_) => json!({ "summary": summary, "trajectory": out_rows(&table) }),
        None => summary,
    };
    Ok(Output {
        table,
        json: Some(json),
        summary: None,
    })
}

fn trace(a: &TraceArgs) -> Result<Output, CliError> {
    let tr = oracle::trace_separatrix(a.delta, &a.integrator.config())?;
    let table = if a.polyline {
        let mut t = Table::new(["t", "z", "x", "u"]);
        for s in &tr.polyline {
            t.push(vec![
                Cell::Float(s.t),
                Cell::Float(tr.delta * (-s.t).exp()),
                Cell::Float(s.x),
                Cell::Float(s.u),
            ]);
        }
        t
    } else {
        let mut t = Table::new(["delta", "xc", "uc", "t_cross", "zc", "error_estimate"]);
        t.push(
            [tr.delta, tr.xc, tr.uc, tr.t_cross, tr.zc, tr.error_estimate]
                .into_iter()
                .map(Cell::Float)
                .collect(),
        );
        t
    };
    let mut json = serde_json::to_value(&tr)?;
    if !a.polyline {
        if let Value::Object(o) = &mut json {
            o.remove("polyline");
        }
    }
    Ok(Output {
        table,
        json: Some(json),
        summary: None,
    })
}

fn find_xc(a: &FindXcArgs) -> Result<Output, CliError> {
    let est = oracle::find_xc_in(a.lo, a.hi, &a.integrator.config(), a.tol)?;
    let mut t = Table::new(["xc", "lo", "hi", "probes"]);
    t.push(vec![
        Cell::Float(est.xc),
        Cell::Float(est.lo),
        Cell::Float(est.hi),
        Cell::Index(est.probes),
    ]);
    Ok(Output {
        table: t,
        json: Some(serde_json::to_value(est)?),
        summary: None,
    })
}

pub(crate) fn portrait_table(grid: &PortraitGrid, cfg: &IntegratorConfig) -> Result<Table, CliError> {
    let cells = oracle::phase_portrait(grid, cfg)?;
    let mut t = Table::new(["x0", "u0", "fate", "t_event"]);
    for c in cells {
        t.push(vec![
            Cell::Float(c.x0),
            Cell::Float(c.u0),
            Cell::Text(c.fate.as_str().into()),
            Cell::Float(c.t_event),
        ]);
    }
    Ok(t)
}

fn portrait(a: &PortraitArgs) -> Result<Output, CliError> {
    let grid = PortraitGrid {
        x_range: (a.x_range.0, a.x_range.1),
        u_range: (a.u_range.0, a.u_range.1),
        nx: a.resolution.0,
        nu: a.resolution.1,
    };
    Ok(portrait_table(&grid, &a.integrator.config())?.into())
}

pub(crate) fn domb_sykes_report(count: usize, window: Option<Window>, delta: Option<f64>) -> Result<domb_sykes::DombSykesReport, CliError> {
    let table = CoefficientTable::generate(count - 1);
    Ok(domb_sykes::analyse(table.coeffs(), window.map(|w| (w.0, w.1)), delta)?)
}

fn domb_sykes_cmd(a: &DombSykesArgs) -> Result<Output, CliError> {
    let report = domb_sykes_report(a.count, a.window, a.delta)?;
    let within = |n: usize, w: (usize, usize)| w.0 <= n && n <= w.1;
    let mut t = Table::new([
        "n",
        "ratio",
        "inv_n_minus_delta",
        "s_n",
        "in_offset_window",
        "in_growth_window",
    ]);
    for &(n, ratio) in &report.ratios {
        let s = report.s_values.iter().find(|(m, _)| *m == n).map(|p| p.1);
        t.push(vec![
            Cell::Index(n),
            Cell::Float(ratio),
            Cell::Float(1.0 / (n as f64 - report.delta_used)),
            s.map_or(Cell::Missing, Cell::Float),
            Cell::Flag(within(n, report.offset_window)),
            Cell::Flag(within(n, report.growth_window)),
        ]);
    }
    let summary = json!({
        "delta": report.delta,
        "delta_used": report.delta_used,
        "growth": report.growth,
        "offset_window": report.offset_window,
        "growth_window": report.growth_window,
        "excluded": report.excluded,
    });
    Ok(Output {
        table: t,
        json: Some(serde_json::to_value(&report)?),
        summary: Some(summary),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("capture-rg").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn range_and_resolution_parsing() {
        assert_eq!("-1.5:0.5".parse::<Range>().unwrap(), Range(-1.5, 0.5));
        assert!("1.5".parse::<Range>().is_err());
        assert_eq!("40".parse::<Resolution>().unwrap(), Resolution(40, 40));
        assert_eq!("30x20".parse::<Resolution>().unwrap(), Resolution(30, 20));
        assert_eq!("20:39".parse::<Window>().unwrap(), Window(20, 39));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, out, err) = run_capture(&["coeffs", "--bogus"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "usage");
    }

    #[test]
    fn zero_count_rejected_before_work() {
        let (code, _, err) = run_capture(&["coeffs", "--count", "0"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "invalid_argument");
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("critical-terms"));
    }
}
