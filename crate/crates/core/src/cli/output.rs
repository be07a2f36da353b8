//! Result rows and their CSV/JSON encodings.

use std::io::{self, Write};

pub const COLUMNS: [&str; 21] = [
    "kind",
    "T",
    "R",
    "policy",
    "estimator",
    "sigma1",
    "sigma2",
    "mu1",
    "mu2",
    "gap",
    "x",
    "misid_prob",
    "misid_se",
    "mean_regret",
    "regret_se",
    "scaled_regret",
    "n1_frac",
    "seed",
    "name",
    "value",
    "scaled_regret_se",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    Int(u64),
    Float(f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

/// One output row; cells absent for its kind stay empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    cells: Vec<Cell>,
}

impl Row {
    pub fn new(kind: &str) -> Self {
        let mut cells = vec![Cell::Empty; COLUMNS.len()];
        cells[0] = kind.into();
        Row { cells }
    }

    pub fn set(mut self, column: &str, value: impl Into<Cell>) -> Self {
        let i = COLUMNS
            .iter()
            .position(|c| *c == column)
            .unwrap_or_else(|| panic!("unknown column {column}"));
        self.cells[i] = value.into();
        self
    }

    pub fn get(&self, column: &str) -> Option<&Cell> {
        COLUMNS.iter().position(|c| *c == column).map(|i| &self.cells[i])
    }
}

/// printf-style `%.17g`: round-trips every f64.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Empty => String::new(),
        Cell::Text(s) => s.clone(),
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_g17(*v),
    }
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[Row]) -> io::Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for r in rows {
        let line: Vec<String> = r.cells.iter().map(csv_cell).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

fn json_cell(c: &Cell) -> serde_json::Value {
    use serde_json::Value;
    match c {
        Cell::Empty => Value::Null,
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Int(v) => Value::from(*v),
        Cell::Float(v) if v.is_finite() => Value::from(*v),
        Cell::Float(v) => Value::String(format_g17(*v)),
    }
}

/// A JSON array of row objects, keys in column order.
pub fn write_json<W: Write>(out: &mut W, rows: &[Row]) -> io::Result<()> {
    writeln!(out, "[")?;
    for (i, r) in rows.iter().enumerate() {
        let fields: Vec<String> = COLUMNS
            .iter()
            .zip(&r.cells)
            .map(|(k, c)| format!("{}: {}", serde_json::Value::from(*k), json_cell(c)))
            .collect();
        let sep = if i + 1 < rows.len() { "," } else { "" };
        writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
    }
    writeln!(out, "]")
}
