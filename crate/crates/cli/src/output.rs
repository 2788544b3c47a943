//! Rendering of command results as an aligned table, CSV or JSON.
//!
//! Every command produces serde records; their field order defines the
//! columns. Numbers keep full precision in CSV and JSON.

use std::io::{self, Write};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

/// Records ready for rendering. `single` outputs render as one JSON object.
#[derive(Debug, Clone, PartialEq)]
pub struct Records {
    rows: Vec<Map<String, Value>>,
    single: bool,
}

impl Records {
    pub fn one<T: Serialize>(record: &T) -> Self {
        Self {
            rows: vec![to_map(record)],
            single: true,
        }
    }

    pub fn many<T: Serialize>(records: &[T]) -> Self {
        Self {
            rows: records.iter().map(to_map).collect(),
            single: false,
        }
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Json => {
                let value = if self.single {
                    Value::Object(self.rows[0].clone())
                } else {
                    Value::Array(self.rows.iter().cloned().map(Value::Object).collect())
                };
                serde_json::to_writer_pretty(&mut *out, &value)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                if let Some(first) = self.rows.first() {
                    w.write_record(first.keys())?;
                }
                for row in &self.rows {
                    w.write_record(row.values().map(csv_cell))?;
                }
                w.flush()
            }
            Format::Table => {
                let Some(first) = self.rows.first() else {
                    return Ok(());
                };
                let header: Vec<String> = first.keys().cloned().collect();
                let body: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.values().map(table_cell).collect())
                    .collect();
                let widths: Vec<usize> = (0..header.len())
                    .map(|i| {
                        body.iter()
                            .map(|r| r[i].len())
                            .chain(std::iter::once(header[i].len()))
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: &[String]| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                writeln!(out, "{}", line(&header))?;
                for row in &body {
                    writeln!(out, "{}", line(row))?;
                }
                Ok(())
            }
        }
    }
}

fn to_map<T: Serialize>(record: &T) -> Map<String, Value> {
    match serde_json::to_value(record).expect("records serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => f.to_string(),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

fn table_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().unwrap_or(f64::NAN);
            if f != 0.0 && (f.abs() < 1e-4 || f.abs() >= 1e7) {
                format!("{f:.6e}")
            } else {
                let s = format!("{f:.6}");
                let s = s.trim_end_matches('0');
                s.trim_end_matches('.').to_string()
            }
        }
        Value::Null => "-".into(),
        other => csv_cell(other),
    }
}
