//! Figure datasets. Each figure becomes one or more CSV files in `--out-dir`,
//! each starting with the same `# config:` line as regular output.
//!
//! | figure            | file                | columns                                         |
//! |-------------------|---------------------|-------------------------------------------------|
//! | `fig1-portrait`   | `portrait.csv`      | x0, u0, fate, t_event                           |
//! |                   | `nullcline.csv`     | x, u (u = -x²)                                  |
//! |                   | `separatrix.csv`    | t, x, u (numerical backward trace)              |
//! |                   | `critical_point.csv`| source, x, u                                    |
//! | `fig2-separatrix` | `family.csv`        | z, x_1, u_1, ..., x_N, u_N                      |
//! |                   | `numerical.csv`     | z, x, u (numerical trace, z = δe^{-t})          |
//! | `fig3-terms`      | `terms.csv`         | n, zc_ratio, xc_ratio, zc_in_band, xc_in_band   |
//! | `fig4-domb-sykes` | `main.csv`          | n, inv_n_minus_delta, ratio, in_window          |
//! |                   | `upper_inset.csv`   | n, s_n, fit                                     |
//! |                   | `lower_inset.csv`   | n, inv_n_minus_delta, ratio, fit                |

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::coefficients::CoefficientTable;
use crate::critical::CriticalSeries;
use crate::oracle::{self, PortraitGrid};
use crate::rational::{self, Rational};

use super::render::{self, Cell, Table};
use super::{at_least, ordered, validate_integrator, CliError, IntegratorArgs, Range, Resolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Figure {
    #[value(name = "fig1-portrait")]
    #[serde(rename = "fig1-portrait")]
    Fig1Portrait,
    #[value(name = "fig2-separatrix")]
    #[serde(rename = "fig2-separatrix")]
    Fig2Separatrix,
    #[value(name = "fig3-terms")]
    #[serde(rename = "fig3-terms")]
    Fig3Terms,
    #[value(name = "fig4-domb-sykes")]
    #[serde(rename = "fig4-domb-sykes")]
    Fig4DombSykes,
}

#[derive(Args, Debug, Serialize)]
pub struct DatasetArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Critical-series order for the term ratios and the x_c marker.
    #[arg(long, default_value_t = 30)]
    pub order: usize,
    /// Number of separatrix coefficients in the Domb-Sykes plot.
    #[arg(long, default_value_t = 40)]
    pub count: usize,
    /// Largest truncation in the separatrix family.
    #[arg(long, default_value_t = 5)]
    pub max_order: usize,
    #[arg(long, default_value = "-0.2:1.2", allow_hyphen_values = true)]
    pub x_range: Range,
    #[arg(long, default_value = "-1.2:0.4", allow_hyphen_values = true)]
    pub u_range: Range,
    #[arg(long, default_value = "41")]
    pub resolution: Resolution,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub integrator: IntegratorArgs,
}

impl DatasetArgs {
    pub(crate) fn validate(&self) -> Result<(), CliError> {
        at_least("order", self.order, 2)?;
        at_least("count", self.count, 3)?;
        at_least("max-order", self.max_order, 1)?;
        ordered("x-range", self.x_range.0, self.x_range.1)?;
        ordered("u-range", self.u_range.0, self.u_range.1)?;
        at_least("resolution", self.resolution.0.min(self.resolution.1), 2)?;
        super::positive("delta", self.delta)?;
        validate_integrator(&self.integrator)
    }
}

/// Writes the figure's files and returns a listing of what was written.
pub(crate) fn emit(args: &DatasetArgs, config: &Value, digits: Option<usize>) -> Result<Table, CliError> {
    fs::create_dir_all(&args.out_dir)?;
    let files = match args.figure {
        Figure::Fig1Portrait => fig1(args)?,
        Figure::Fig2Separatrix => fig2(args)?,
        Figure::Fig3Terms => vec![("terms.csv", super::critical_terms(args.order)?)],
        Figure::Fig4DombSykes => fig4(args)?,
    };
    let mut listing = Table::new(["file", "rows"]);
    for (name, table) in files {
        let path = args.out_dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        render::write_csv(&mut out, &table, config, digits)?;
        out.flush()?;
        listing.push(vec![Cell::Text(path.display().to_string()), Cell::Index(table.rows.len())]);
    }
    Ok(listing)
}

fn fig1(args: &DatasetArgs) -> Result<Vec<(&'static str, Table)>, CliError> {
    let cfg = args.integrator.config();
    let grid = PortraitGrid {
        x_range: (args.x_range.0, args.x_range.1),
        u_range: (args.u_range.0, args.u_range.1),
        nx: args.resolution.0,
        nu: args.resolution.1,
    };
    let portrait = super::portrait_table(&grid, &cfg)?;

    let mut nullcline = Table::new(["x", "u"]);
    for x in super::linspace(args.x_range.0, args.x_range.1, 201) {
        nullcline.push(vec![Cell::Float(x), Cell::Float(-x * x)]);
    }

    let trace = oracle::trace_separatrix(args.delta, &cfg)?;
    let mut separatrix = Table::new(["t", "x", "u"]);
    for s in &trace.polyline {
        separatrix.push(vec![Cell::Float(s.t), Cell::Float(s.x), Cell::Float(s.u)]);
    }

    let series = CriticalSeries::compute(args.order, &CoefficientTable::generate(args.order))?;
    let xc_series = rational::to_f64(&series.xc_sum(args.order)?);
    let mut marker = Table::new(["source", "x", "u"]);
    marker.push(vec![
        Cell::Text(format!("series-{}", args.order)),
        Cell::Float(xc_series),
        Cell::Float(-xc_series * xc_series),
    ]);
    marker.push(vec![Cell::Text("trace".into()), Cell::Float(trace.xc), Cell::Float(trace.uc)]);

    Ok(vec![
        ("portrait.csv", portrait),
        ("nullcline.csv", nullcline),
        ("separatrix.csv", separatrix),
        ("critical_point.csv", marker),
    ])
}

fn fig2(args: &DatasetArgs) -> Result<Vec<(&'static str, Table)>, CliError> {
    let trace = oracle::trace_separatrix(args.delta, &args.integrator.config())?;
    // Cover the traced arc, from the seed out to the nullcline crossing.
    let family = super::separatrix_family(args.max_order, Rational::from_integer(1.into()), (0.0, trace.zc), 101)?;
    let mut numerical = Table::new(["z", "x", "u"]);
    for s in &trace.polyline {
        numerical.push(vec![
            Cell::Float(args.delta * (-s.t).exp()),
            Cell::Float(s.x),
            Cell::Float(s.u),
        ]);
    }
    Ok(vec![("family.csv", family), ("numerical.csv", numerical)])
}

fn fig4(args: &DatasetArgs) -> Result<Vec<(&'static str, Table)>, CliError> {
    let report = super::domb_sykes_report(args.count, None, None)?;
    let delta = report.delta_used;
    let (glo, ghi) = report.growth_window;
    let (olo, ohi) = report.offset_window;

    let mut main = Table::new(["n", "inv_n_minus_delta", "ratio", "in_window"]);
    let mut lower = Table::new(["n", "inv_n_minus_delta", "ratio", "fit"]);
    for &(n, ratio) in &report.ratios {
        let x = 1.0 / (n as f64 - delta);
        let inside = glo <= n && n <= ghi;
        main.push(vec![Cell::Index(n), Cell::Float(x), Cell::Float(ratio), Cell::Flag(inside)]);
        if inside {
            let fit = report.growth_fit.intercept + report.growth_fit.slope * x;
            lower.push(vec![Cell::Index(n), Cell::Float(x), Cell::Float(ratio), Cell::Float(fit)]);
        }
    }

    let mut upper = Table::new(["n", "s_n", "fit"]);
    for &(n, s) in &report.s_values {
        let fit = if olo <= n && n <= ohi {
            Cell::Float(report.offset_fit.intercept + report.offset_fit.slope * n as f64)
        } else {
            Cell::Missing
        };
        upper.push(vec![Cell::Index(n), Cell::Float(s), fit]);
    }
    Ok(vec![
        ("main.csv", main),
        ("upper_inset.csv", upper),
        ("lower_inset.csv", lower),
    ])
}
