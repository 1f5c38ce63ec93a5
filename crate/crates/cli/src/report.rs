use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{Map, Value};

/// One output row. Keys are kept sorted so every rendering is canonical.
#[derive(Clone, Debug, Default)]
pub struct Row {
    fields: BTreeMap<String, Value>,
}

impl Row {
    pub fn new(id: impl Into<String>) -> Self {
        let mut r = Row::default();
        r.fields.insert("id".into(), Value::String(id.into()));
        r
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.insert(key.into(), Value::String(value.to_string()));
        self
    }

    pub fn flag(mut self, key: &str, value: bool) -> Self {
        self.fields.insert(key.into(), Value::Bool(value));
        self
    }

    pub fn pass(self, ok: bool) -> Self {
        self.flag("pass", ok)
    }

    pub fn passed(&self) -> bool {
        self.fields.get("pass").and_then(Value::as_bool).unwrap_or(true)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.get(key).and_then(Value::as_str)
    }

    fn cell(&self, key: &str) -> String {
        match self.fields.get(key) {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Bool(b)) => b.to_string(),
            Some(v) => v.to_string(),
            None => String::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub digits: u32,
    pub tolerance: String,
    pub rows: Vec<Row>,
    /// Free-form lines printed under the text table.
    pub notes: Vec<String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(Row::passed)
    }

    pub fn to_json(&self) -> Value {
        let mut config = Map::new();
        config.insert("digits".into(), Value::String(self.digits.to_string()));
        config.insert("tolerance".into(), Value::String(self.tolerance.clone()));
        let rows = self.rows.iter().map(|r| Value::Object(r.fields.clone().into_iter().collect())).collect();
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("config".into(), Value::Object(config));
        top.insert("rows".into(), Value::Array(rows));
        if !self.notes.is_empty() {
            top.insert("notes".into(), Value::Array(self.notes.iter().cloned().map(Value::String).collect()));
        }
        Value::Object(top)
    }

    fn columns(&self) -> Vec<String> {
        // id first, pass last, everything else alphabetical
        let mut keys: Vec<String> = self.rows.iter().flat_map(|r| r.fields.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        keys.retain(|k| k != "id" && k != "pass");
        let mut cols = vec!["id".to_string()];
        cols.extend(keys);
        if self.rows.iter().any(|r| r.fields.contains_key("pass")) {
            cols.push("pass".into());
        }
        cols
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => {
                let cols = self.columns();
                let mut out = cols.join(",");
                out.push('\n');
                for r in &self.rows {
                    let line: Vec<String> = cols.iter().map(|c| csv_escape(&r.cell(c))).collect();
                    out.push_str(&line.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (digits {}, tolerance {})", self.command, self.digits, self.tolerance);
        for r in &self.rows {
            let mark = match r.fields.get("pass").and_then(Value::as_bool) {
                Some(true) => "ok  ",
                Some(false) => "FAIL",
                None => "    ",
            };
            let _ = write!(out, "{mark} {}", r.cell("id"));
            for (k, v) in &r.fields {
                if k == "id" || k == "pass" {
                    continue;
                }
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = write!(out, "  {k}={v}");
            }
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if self.rows.iter().any(|r| r.fields.contains_key("pass")) {
            let failed = self.rows.iter().filter(|r| !r.passed()).count();
            let _ = writeln!(out, "{} rows, {} failed", self.rows.len(), failed);
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
