//! JSON and CSV writers. Numbers use the shortest decimal form that reads
//! back to the same f64; non-finite values become null (JSON) or empty (CSV).

use std::fs::File;
use std::io::{self, Write};

use serde_json::{json, Map, Value};

use crate::{Cli, CliError, Format};

/// Rows with named columns, plus an optional summary object.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new(), summary: None }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn json_document(cli: &Cli, table: &Table) -> Value {
    let results: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> =
                table.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.clone())).collect();
            Value::Object(obj)
        })
        .collect();
    let mut doc = json!({
        "meta": {
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command.name(),
            "config": cli,
            "columns": table.columns,
        },
        "results": results,
    });
    if let Some(s) = &table.summary {
        doc["summary"] = s.clone();
    }
    doc
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv<W: Write>(out: W, table: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(csv_cell))?;
    }
    w.flush()
}

fn emit<W: Write>(mut out: W, cli: &Cli, table: &Table) -> io::Result<()> {
    match cli.common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &json_document(cli, table))?;
            writeln!(out)?;
            out.flush()
        }
        Format::Csv => write_csv(out, table),
    }
}

pub fn write(cli: &Cli, table: &Table) -> Result<(), CliError> {
    let res = match &cli.common.output {
        Some(path) => File::create(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            .and_then(|f| emit(io::BufWriter::new(f), cli, table)),
        None => emit(io::stdout().lock(), cli, table),
    };
    res.map_err(|e| CliError::Io(e.to_string()))
}
