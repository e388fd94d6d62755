use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One command's output: echoed configuration, scalar results and a table.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Vec<(&'static str, Value)>,
    pub summary: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_i64() {
            Some(i) if !n.is_f64() => i.to_string(),
            _ => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Header comment value: numbers in shortest round-trip form.
fn header_value(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            config: Vec::new(),
            summary: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command = {}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(s, "# {k} = {}", header_value(v));
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# {k} = {}", header_value(v));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(cell).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let obj = |pairs: &[(&'static str, Value)]| {
            Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<Map<_, _>>())
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.clone()))
                        .collect::<Map<_, _>>(),
                )
            })
            .collect();
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.into()));
        root.insert("config".into(), obj(&self.config));
        root.insert("summary".into(), obj(&self.summary));
        root.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).unwrap_or_default();
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<command>.<ext>`, or stdout without a directory.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let text = self.render(format);
        match out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{}.{}", self.command.replace(' ', "-"), format.extension()));
                fs::write(&path, text)?;
                eprintln!("wrote {}", path.display());
                Ok(())
            }
            None => io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells() {
        assert_eq!(cell(&num(0.5)), "5.0000000000000000e-1");
        assert_eq!(cell(&Value::from(3)), "3");
        assert_eq!(cell(&Value::Null), "");
        assert_eq!(cell(&Value::from("a,b")), "\"a,b\"");
    }

    #[test]
    fn json_rows_are_keyed() {
        let mut r = Report::new("x");
        r.columns = vec!["t", "k"];
        r.rows.push(vec![num(1.0), num(2.0)]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"][0]["k"], 2.0);
    }
}
