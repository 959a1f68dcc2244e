use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Cli, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.14e}"),
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "pass" } else { "fail" }.into())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// One row per parameter point; the last column is always `tag`, naming the
/// relation the row tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Tolerances the run used, reported in the JSON metadata.
    pub tolerances: Vec<(&'static str, f64)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        let mut columns = columns.to_vec();
        columns.push("tag");
        Table {
            columns,
            rows: Vec::new(),
            tolerances: Vec::new(),
        }
    }

    pub fn push(&mut self, tag: &str, mut row: Vec<Cell>) {
        row.push(Cell::Text(tag.into()));
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn tolerance(mut self, name: &'static str, value: f64) -> Self {
        self.tolerances.push((name, value));
        self
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(Cell::csv))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_json(&self, cli: &Cli) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let mut tolerances: Map<String, Value> =
            self.tolerances.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        if let Some(tol) = cli.common.tol {
            tolerances.insert("tol".into(), json!(tol));
        }
        json!({
            "config": to_value(cli),
            "rows": rows,
            "metadata": {
                "version": env!("CARGO_PKG_VERSION"),
                "seed": cli.common.seed,
                "tolerances": tolerances,
            }
        })
    }

    pub fn write<W: Write>(&self, cli: &Cli, mut w: W) -> std::io::Result<()> {
        match cli.common.format {
            Format::Csv => self.write_csv(w).map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => io,
                k => std::io::Error::other(format!("{k:?}")),
            }),
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.to_json(cli))?;
                writeln!(w)
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("config serializes")
}
