use std::io::{self, Write};

use clap::ValueEnum;
use num_bigint::BigUint;
use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// One command's output: scalar fields, an optional table, and a verdict
/// when the command checks something.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub provenance: String,
    pub fields: Map<String, Value>,
    pub table: Option<(String, Vec<Map<String, Value>>)>,
    pub pass: Option<bool>,
}

impl Report {
    pub fn new(command: &str, provenance: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            provenance: provenance.into(),
            fields: Map::new(),
            table: None,
            pass: None,
        }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    pub fn table(mut self, key: &str, rows: Vec<Map<String, Value>>) -> Self {
        self.table = Some((key.into(), rows));
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("schema_version".into(), SCHEMA_VERSION.into());
        out.insert("command".into(), self.command.clone().into());
        out.insert("provenance".into(), self.provenance.clone().into());
        out.extend(self.fields.clone());
        if let Some((key, rows)) = &self.table {
            out.insert(key.clone(), Value::Array(rows.iter().cloned().map(Value::Object).collect()));
        }
        if let Some(p) = self.pass {
            out.insert("pass".into(), p.into());
        }
        Value::Object(out)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
            Format::Text => self.write_text(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let rows: Vec<Map<String, Value>> = match &self.table {
            Some((_, rows)) => rows.clone(),
            None => {
                let mut row = self.fields.clone();
                if let Some(p) = self.pass {
                    row.insert("pass".into(), p.into());
                }
                vec![row]
            }
        };
        let mut header: Vec<String> = Vec::new();
        for row in &rows {
            for k in row.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        w.write_record(&header)?;
        for row in &rows {
            w.write_record(header.iter().map(|k| row.get(k).map(cell).unwrap_or_default()))?;
        }
        w.flush()
    }

    fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{} ({})", self.command, self.provenance)?;
        for (k, v) in &self.fields {
            writeln!(out, "  {k}: {}", cell(v))?;
        }
        if let Some((key, rows)) = &self.table {
            writeln!(out, "  {key}:")?;
            for row in rows {
                let parts: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect();
                writeln!(out, "    {}", parts.join(" "))?;
            }
        }
        if let Some(p) = self.pass {
            writeln!(out, "  pass: {p}")?;
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// An exact integer as a JSON number.
pub fn big(n: &BigUint) -> Value {
    Value::Number(n.to_string().parse::<Number>().expect("decimal integer"))
}

pub fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

pub fn object<T: serde::Serialize>(v: &T) -> Map<String, Value> {
    match to_value(v) {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}
