//! Result tables and their CSV and JSON renderings.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, Options};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) if x.is_nan() => "NaN".to_owned(),
            Cell::Float(x) if *x > 0.0 => "inf".to_owned(),
            Cell::Float(_) => "-inf".to_owned(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            // Non-finite floats become null.
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// Rows of one subcommand plus the metadata that accompanies them in JSON.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            meta: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Document<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a Options,
    columns: &'a [&'static str],
    rows: Vec<Vec<Value>>,
    #[serde(flatten)]
    meta: &'a Map<String, Value>,
}

pub fn render(table: &Table, format: Format, command: &str, config: &Options) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(table, command, config),
    }
}

fn render_csv(table: &Table) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv_field)).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn render_json(table: &Table, command: &str, config: &Options) -> Result<Vec<u8>, CliError> {
    let doc = Document {
        tool: "fadres",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        columns: table.columns,
        rows: table
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json_value).collect())
            .collect(),
        meta: &table.meta,
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_output(bytes: &[u8], out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "kind"]);
        t.push(vec![Cell::Float(1.0), "a".into()]);
        t.push(vec![Cell::Float(f64::NAN), "b".into()]);
        t.push(vec![Cell::Float(-0.1), "c".into()]);
        t
    }

    #[test]
    fn csv_uses_seventeen_digits_and_lf() {
        let text = String::from_utf8(render_csv(&sample()).unwrap()).unwrap();
        assert_eq!(
            text,
            "x,kind\n1.0000000000000000e0,a\nNaN,b\n-1.0000000000000001e-1,c\n"
        );
    }

    #[test]
    fn csv_values_round_trip() {
        for x in [0.1, 1.0 / 3.0, -(1.0 + 2f64.sqrt()), 5e-324, 1.7976931348623157e308] {
            let s = Cell::Float(x).csv_field();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_table_still_has_header() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(render_csv(&t).unwrap(), b"a,b\n");
    }

    #[test]
    fn json_nulls_non_finite() {
        let bytes = render_json(&sample(), "test", &Options::default()).unwrap();
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["rows"][1][0], Value::Null);
        assert_eq!(v["rows"][0][0], Value::from(1.0));
        assert_eq!(v["columns"][1], "kind");
    }
}
