use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Provenance written with every artifact.
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub params: Value,
    pub seed: u64,
    pub started: Instant,
}

impl Meta {
    fn wall_clock(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }
}

/// A rectangular result with JSON-valued cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// CSV body only, the part that must be byte-reproducible.
    pub fn csv_body(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.headers).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// `# key=value` header lines, then the CSV body.
    pub fn to_csv(&self, meta: &Meta) -> Result<String> {
        let mut out = format!(
            "# tool={}\n# version={}\n# seed={}\n# params={}\n# wall_clock_seconds={:.3}\n",
            meta.tool,
            meta.version,
            meta.seed,
            meta.params,
            meta.wall_clock()
        );
        out.push_str(&self.csv_body()?);
        Ok(out)
    }

    /// Rows as objects keyed by header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self.headers.iter().cloned().zip(row.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// JSON document: payload plus provenance, with timing kept in `header`.
pub fn envelope<T: Serialize>(meta: &Meta, payload: &T) -> String {
    let doc = json!({
        "tool": meta.tool,
        "version": meta.version,
        "params": meta.params,
        "seed": meta.seed,
        "header": {"wall_clock_seconds": meta.wall_clock()},
        "payload": payload,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_lines_and_quotes() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![json!(1), json!("x,y")]);
        t.push(vec![Value::Null, json!(true)]);
        let meta = Meta { tool: "t", version: "0", params: json!({"k": 3}), seed: 9, started: Instant::now() };
        let csv = t.to_csv(&meta).unwrap();
        assert!(csv.starts_with("# tool=t\n# version=0\n# seed=9\n# params={\"k\":3}\n"));
        assert!(csv.ends_with("a,b\n1,\"x,y\"\n,true\n"));
        assert_eq!(t.to_json()[0]["b"], json!("x,y"));
    }
}
