//! Tabular output: CSV with a `# config:` comment line, or a JSON document
//! carrying the same config under `"config"`.

use std::io::Write;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::rational::{self, Rational};

use super::{CliError, Format};

pub(crate) enum Cell {
    Index(usize),
    Exact(Rational),
    Integer(BigInt),
    /// Inexact value, rendered with the run's float precision.
    Float(f64),
    /// Exact value rounded to a fixed number of decimals.
    Fixed(Rational, usize),
    /// Scientific notation with the given number of significant digits.
    Sci(f64, usize),
    Text(String),
    Flag(bool),
    Missing,
}

/// Default rendering: shortest round-trip form, switching to an exponent
/// outside `[1e-4, 1e15)`. With `digits`, that many decimals (or mantissa
/// decimals when an exponent is used).
pub fn format_float(value: f64, digits: Option<usize>) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let plain = value == 0.0 || (1e-4..1e15).contains(&value.abs());
    match (digits, plain) {
        (None, true) => value.to_string(),
        (None, false) => pad_exponent(&format!("{value:e}")),
        (Some(d), true) => format!("{value:.d$}"),
        (Some(d), false) => sci(value, d + 1),
    }
}

/// `printf("%.{sig-1}e")`-style: `3.872e-09`.
pub fn sci(value: f64, significant: usize) -> String {
    let decimals = significant.saturating_sub(1);
    pad_exponent(&format!("{value:.decimals$e}"))
}

fn pad_exponent(text: &str) -> String {
    match text.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => text.to_string(),
    }
}

impl Cell {
    fn csv(&self, digits: Option<usize>) -> String {
        match self {
            Cell::Index(n) => n.to_string(),
            Cell::Exact(r) => r.to_string(),
            Cell::Integer(i) => i.to_string(),
            Cell::Float(v) => format_float(*v, digits),
            Cell::Fixed(r, d) => rational::to_fixed(r, *d),
            Cell::Sci(v, sig) => sci(*v, *sig),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Index(n) => json!(n),
            Cell::Exact(r) => json!(r.to_string()),
            Cell::Integer(i) => json!(i.to_string()),
            Cell::Float(v) | Cell::Sci(v, _) => Value::from(*v),
            Cell::Fixed(r, d) => Value::from(rational::to_fixed(r, *d).parse::<f64>().unwrap_or(f64::NAN)),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }
}

pub(crate) struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let object: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json()))
                    .collect();
                Value::Object(object)
            })
            .collect();
        Value::Array(rows)
    }
}

/// What a command produces: always a table; some commands have a richer JSON form.
pub(crate) struct Output {
    pub table: Table,
    pub json: Option<Value>,
    /// Scalar results that do not fit the table, written as `# summary:` in CSV.
    pub summary: Option<Value>,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Self {
            table,
            json: None,
            summary: None,
        }
    }
}

pub(crate) fn write_output(
    out: &mut dyn Write,
    output: &Output,
    config: &Value,
    format: Format,
    digits: Option<usize>,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "# config: {config}")?;
            if let Some(summary) = &output.summary {
                writeln!(out, "# summary: {summary}")?;
            }
            write_rows(out, &output.table, digits)
        }
        Format::Json => {
            let data = output.json.clone().unwrap_or_else(|| output.table.json_rows());
            let doc = json!({ "config": config, "data": data });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

pub(crate) fn write_csv(out: &mut dyn Write, table: &Table, config: &Value, digits: Option<usize>) -> Result<(), CliError> {
    writeln!(out, "# config: {config}")?;
    write_rows(out, table, digits)
}

fn write_rows(out: &mut dyn Write, table: &Table, digits: Option<usize>) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|c| c.csv(digits)))?;
    }
    writer.flush()?;
    Ok(())
}
