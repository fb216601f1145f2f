//! Report rendering. Every float is written with 17 significant digits and
//! every file starts with the tolerance block it was produced under.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::hpoly::C64;
use crate::projline::ProjPoint;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i128),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<u128> for Cell {
    fn from(x: u128) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// `(z_re, z_im, w_re, w_im)` of the canonical representative.
pub fn point_cells(p: &ProjPoint) -> [Cell; 4] {
    let (z, w) = p.coords();
    [z.re.into(), z.im.into(), w.re.into(), w.im.into()]
}

pub fn point_columns(prefix: &str) -> [String; 4] {
    ["z_re", "z_im", "w_re", "w_im"].map(|s| format!("{prefix}{s}"))
}

pub fn complex_cells(c: C64) -> [Cell; 2] {
    [c.re.into(), c.im.into()]
}

#[derive(Debug, Clone, Default)]
pub struct Table {
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
}

/// Everything a command produces: a structured result for JSON and a table
/// for CSV.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub tolerances: Tolerances,
    pub config: Value,
    pub result: Value,
    pub table: Table,
    pub notes: Vec<String>,
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_json(&self) -> String {
        let doc = serde_json::json!({
            "command": self.command,
            "tolerances": self.tolerances,
            "config": self.config,
            "notes": self.notes,
            "result": self.result,
        });
        let mut out = String::new();
        write_json(&mut out, &doc, 0);
        out.push('\n');
        out
    }

    fn render_csv(&self) -> String {
        let t = &self.tolerances;
        let mut out = String::new();
        let _ = writeln!(out, "# ratbound {}", self.command);
        let _ = writeln!(
            out,
            "# tolerances: tol={} eps_pt={} eps_hole={} tol_indeterminate={}",
            fmt_f64(t.tol),
            fmt_f64(t.eps_pt),
            fmt_f64(t.eps_hole),
            fmt_f64(t.tol_indeterminate)
        );
        let _ = writeln!(out, "# config: {}", self.config);
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        let _ = writeln!(out, "{}", self.table.columns.join(","));
        for row in &self.table.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_f64(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => csv_text(s),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Pretty JSON with floats in `{:.16e}` form. serde_json would print the
/// shortest round-trip form instead.
fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short scalar arrays (complex numbers, points) stay on one line.
            let flat = items.iter().all(|x| !x.is_object())
                && items.iter().all(|x| x.as_array().is_none_or(|a| a.iter().all(|y| !y.is_array() && !y.is_object())))
                && items.len() <= 4;
            if flat {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(out, x, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(out, x, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}
