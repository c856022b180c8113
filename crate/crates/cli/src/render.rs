//! Report rendering: `key: value` text, single-row CSV, or versioned JSON.

use std::fmt::Display;

use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const SCHEMA: &str = "v1";

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn fmt_f64(x: f64) -> String {
    round12(x).to_string()
}

fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Exact integer as a JSON number when it fits in `u64`, else as a string.
pub fn int<T: Display>(x: T) -> Value {
    let s = x.to_string();
    match s.parse::<u64>() {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(s),
    }
}

pub fn float(x: f64) -> Value {
    Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

/// A flat report whose fields keep insertion order.
#[derive(Default)]
pub struct Report {
    command: &'static str,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            fields: Map::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_owned(), round_floats(value.into()));
        self
    }

    /// Merges the fields of a serializable struct.
    pub fn extend<T: Serialize>(&mut self, value: &T) -> &mut Self {
        if let Value::Object(map) = serde_json::to_value(value).expect("reports serialize") {
            for (k, v) in map {
                self.fields.insert(k, round_floats(v));
            }
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut out = Map::new();
        out.insert("schema".into(), SCHEMA.into());
        out.insert("command".into(), self.command.into());
        out.extend(self.fields.clone());
        let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("json");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        self.fields
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", scalar(v)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.fields.keys()).expect("csv header");
        w.write_record(self.fields.values().map(scalar)).expect("csv row");
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
    }
}

/// Rows with a fixed column set.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("csv header");
        for row in &self.rows {
            w.write_record(row.iter().map(scalar)).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| ((*c).to_owned(), v.clone()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

pub fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => fmt_f64(f),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => float(n.as_f64().expect("f64")),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}
