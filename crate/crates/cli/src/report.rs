use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// A flat table rendered for the CSV and markdown formats.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let mut row: Vec<String> = cells.into_iter().map(|c| c.to_string()).collect();
        // short rows are padded to the header's width
        if row.len() < self.headers.len() {
            row.resize(self.headers.len(), String::new());
        }
        self.rows.push(row);
    }

    /// Two-column view of a flat JSON object.
    pub fn key_value(v: &Value) -> Self {
        let mut t = Table::new(&["field", "value"]);
        if let Value::Object(map) = v {
            for (k, v) in map {
                let cell = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                t.row([k.clone(), cell]);
            }
        }
        t
    }
}

/// What a command produced: the structured result, a tabular view and
/// free-text notes.
pub struct Outcome {
    pub inputs: Value,
    pub outputs: Value,
    pub table: Table,
    pub notes: Vec<String>,
    /// A checked expectation failed; the process exits with status 1.
    pub violated: bool,
}

impl Outcome {
    pub fn new(inputs: Value, outputs: impl Serialize, table: Table) -> Self {
        Outcome {
            inputs,
            outputs: serde_json::to_value(outputs).expect("outputs serialize"),
            table,
            notes: Vec::new(),
            violated: false,
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub inputs: Value,
    pub outputs: Value,
    pub notes: Vec<String>,
    pub wall_time_ms: Option<f64>,
    pub engine_version: &'static str,
}

impl RunReport {
    pub fn new(command: Vec<String>, outcome: &Outcome, elapsed: Option<Duration>) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command,
            inputs: outcome.inputs.clone(),
            outputs: outcome.outputs.clone(),
            notes: outcome.notes.clone(),
            wall_time_ms: elapsed.map(|d| d.as_secs_f64() * 1e3),
            engine_version: env!("CARGO_PKG_VERSION"),
        }
    }
}

pub fn render(format: Format, report: &RunReport, table: &Table) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers).expect("write to memory");
            for r in &table.rows {
                w.write_record(r).expect("write to memory");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is UTF-8")
        }
        Format::Md => {
            let esc = |s: &str| s.replace('|', "\\|");
            let mut out = String::new();
            out.push_str(&format!("| {} |\n", table.headers.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(table.headers.len())));
            for r in &table.rows {
                out.push_str(&format!("| {} |\n", r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | ")));
            }
            for n in &report.notes {
                out.push_str(&format!("\n> {n}\n"));
            }
            out
        }
    }
}
