//! Tabular output with provenance-tagged columns, written as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde::ser::{Serialize, Serializer};

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            // `{:?}` is the shortest representation that parses back to the same binary64.
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) => s.serialize_f64(*v),
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Text(v) => s.serialize_str(v),
            Cell::Empty => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Appends a row. Non-finite numbers are blanked and reported in the `error` column.
    pub fn push(&mut self, mut row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        let mut bad = Vec::new();
        for (cell, name) in row.iter_mut().zip(&self.columns) {
            if matches!(cell, Cell::Num(v) if !v.is_finite()) {
                bad.push(name.clone());
                *cell = Cell::Empty;
            }
        }
        if !bad.is_empty() {
            let err = self.col("error").expect("tables with numeric columns carry an error column");
            let note = format!("non-finite value in {}", bad.join(" "));
            row[err] = match &row[err] {
                Cell::Text(s) if !s.is_empty() => Cell::Text(format!("{s}; {note}")),
                _ => Cell::Text(note),
            };
        }
        self.rows.push(row);
    }

    pub fn error_count(&self) -> usize {
        let Some(e) = self.col("error") else { return 0 };
        self.rows.iter().filter(|r| matches!(&r[e], Cell::Text(s) if !s.is_empty())).count()
    }
}

/// A command result: the table plus a summary that only appears in JSON output.
pub struct Document<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub summary: serde_json::Value,
    pub warnings: Vec<String>,
    pub table: Table,
}

#[derive(serde::Serialize)]
struct JsonDoc<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    summary: &'a serde_json::Value,
    warnings: &'a [String],
    columns: &'a [String],
    rows: &'a [Vec<Cell>],
}

impl Document<'_> {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
                w.write_record(&self.table.columns)?;
                for r in &self.table.rows {
                    w.write_record(r.iter().map(Cell::csv))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let doc = JsonDoc {
                    schema_version: SCHEMA_VERSION,
                    command: self.command,
                    config: self.config,
                    summary: &self.summary,
                    warnings: &self.warnings,
                    columns: &self.table.columns,
                    rows: &self.table.rows,
                };
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}
