//! Column tables for the commands whose output is not a spectrum grid.

use std::io::{self, Write};

use dicke_core::scattering::io::{fmt_num, round_num};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, meta: Vec<String>) -> Self {
        Table {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        for line in &self.meta {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_num(*v),
                    Cell::Text(s) => s.clone(),
                    Cell::Flag(b) => u8::from(*b).to_string(),
                    Cell::Missing => String::new(),
                })
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// One array per column, plus the metadata lines.
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut cols = Map::new();
        for (k, name) in self.columns.iter().enumerate() {
            let values = self
                .rows
                .iter()
                .map(|row| match &row[k] {
                    Cell::Num(v) => serde_json::Number::from_f64(round_num(*v)).map_or(Value::Null, Value::Number),
                    Cell::Text(s) => Value::String(s.clone()),
                    Cell::Flag(b) => Value::Bool(*b),
                    Cell::Missing => Value::Null,
                })
                .collect();
            cols.insert((*name).to_string(), Value::Array(values));
        }
        let mut doc = Map::new();
        doc.insert("columns".into(), Value::Array(self.columns.iter().map(|c| Value::String((*c).into())).collect()));
        doc.insert("data".into(), Value::Object(cols));
        doc.insert("meta".into(), Value::Array(self.meta.iter().cloned().map(Value::String).collect()));
        serde_json::to_string_pretty(&Value::Object(doc))
    }
}
