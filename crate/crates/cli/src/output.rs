//! JSON, CSV and text renderings of a command result.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn envelope(command: &str, field: &str, result: Value) -> Value {
    json!({ "schema": 1, "command": command, "field": field, "result": result })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Csv | Format::Text => {
            let mut rows = Vec::new();
            let mut m = Map::new();
            m.insert("schema".into(), doc["schema"].clone());
            m.insert("command".into(), doc["command"].clone());
            m.insert("field".into(), doc["field"].clone());
            flatten("", &Value::Object(m), &mut rows);
            flatten("", &doc["result"], &mut rows);
            if format == Format::Csv {
                let head: Vec<String> = rows.iter().map(|(k, _)| csv_cell(k)).collect();
                let vals: Vec<String> = rows.iter().map(|(_, v)| csv_cell(v)).collect();
                format!("{}\n{}\n", head.join(","), vals.join(","))
            } else {
                rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
            }
        }
    }
}
