use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;

/// One CSV field / JSON value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    /// Undefined quantity, e.g. a fidelity where the outcome has zero probability.
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Ten significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9e}")
    } else {
        format!("{v}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round through the CSV text so both formats carry the same digits.
            Cell::Num(v) if v.is_finite() => fmt_num(*v).parse::<f64>().map_or(Value::Null, |x| json!(x)),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results that do not fit the row schema.
    pub summary: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Run metadata written next to every data file.
pub struct Envelope<'a> {
    pub command: &'a str,
    pub config: Value,
    pub notes: &'a [&'a str],
}

fn pretty(v: &Value) -> io::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(io::Error::other)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn meta(env: &Envelope) -> Value {
    json!({
        "tool": "condtele",
        "version": env!("CARGO_PKG_VERSION"),
        "command": env.command,
        "notes": env.notes,
    })
}

/// Writes `<name>.csv|json`, `<name>.config.json` and, for CSV tables with
/// a summary, `<name>_summary.csv`. Returns the written paths.
pub fn write_table(dir: &Path, format: Format, env: &Envelope, table: &Table) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match format {
        Format::Csv => {
            let path = dir.join(format!("{}.csv", table.name));
            write_csv(
                &path,
                &table.columns,
                table.rows.iter().map(|r| r.iter().map(Cell::csv).collect()),
            )?;
            written.push(path);
            if !table.summary.is_empty() {
                let path = dir.join(format!("{}_summary.csv", table.name));
                write_csv(
                    &path,
                    &["key", "value"],
                    table.summary.iter().map(|(k, v)| vec![k.to_string(), v.csv()]),
                )?;
                written.push(path);
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut doc = json!({
                "meta": meta(env),
                "config": env.config,
                "columns": table.columns,
                "rows": rows,
            });
            if !table.summary.is_empty() {
                let s: Map<String, Value> = table.summary.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
                doc["summary"] = Value::Object(s);
            }
            let path = dir.join(format!("{}.json", table.name));
            fs::write(&path, pretty(&doc)?)?;
            written.push(path);
        }
    }
    let sidecar = dir.join(format!("{}.config.json", table.name));
    fs::write(&sidecar, pretty(&json!({ "meta": meta(env), "config": env.config }))?)?;
    written.push(sidecar);
    Ok(written)
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(fmt_num(0.9), "9.000000000e-1");
        assert_eq!(fmt_num(-1234.5678901234), "-1.234567890e3");
        assert_eq!(Cell::Missing.csv(), "");
    }

    #[test]
    fn json_numbers_match_csv_digits() {
        assert_eq!(Cell::Num(0.123456789012345).json(), json!(0.1234567890));
        assert_eq!(Cell::Num(f64::NAN).json(), Value::Null);
    }
}
