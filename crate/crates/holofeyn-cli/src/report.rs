use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Output of one subcommand in all three renderings.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub lines: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Set when an identity or check fails; the process exits with code 2.
    pub failure: Option<String>,
}

impl Report {
    pub fn set(&mut self, key: &str, v: Value) {
        self.fields.insert(key.to_string(), v);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn columns(&mut self, cols: &[&str]) {
        self.header = cols.iter().map(|s| s.to_string()).collect();
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if self.failure.is_none() {
            self.failure = Some(msg);
        }
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let mut v = self.fields.clone();
                v.insert("status".into(), json!(if self.failure.is_some() { "failed" } else { "ok" }));
                if let Some(f) = &self.failure {
                    v.insert("failure".into(), json!(f));
                }
                writeln!(out, "{}", serde_json::to_string_pretty(&Value::Object(v)).unwrap())
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Text => {
                for l in &self.lines {
                    writeln!(out, "{}", l)?;
                }
                if let Some(f) = &self.failure {
                    writeln!(out, "failure: {}", f)?;
                }
                Ok(())
            }
        }
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Finite floats as numbers, infinities as the strings "inf" / "-inf".
pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    if z.im < 0.0 {
        format!("{:.10e} - {:.10e}i", re, -z.im)
    } else {
        format!("{:.10e} + {:.10e}i", re, z.im.abs())
    }
}
