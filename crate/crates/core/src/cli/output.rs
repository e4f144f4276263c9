//! Output documents and their three renderings.
//!
//! Numbers are written in the shortest decimal form that reads back to the
//! same `f64`, so repeated runs produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

pub type Record = Map<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plot,
}

impl Format {
    /// `.csv` → CSV, `.dat`/`.plot`/`.txt` → plot columns, anything else JSON.
    pub fn from_path(p: &Path) -> Format {
        match p.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("dat" | "plot" | "txt") => Format::Plot,
            _ => Format::Json,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub command_line: Vec<String>,
    pub tolerances: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Document {
    pub meta: Meta,
    pub grid: Grid,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("documents serialize")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "nan".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flatten nested arrays into `name_1`, `name_2`, ... (1-based, `_` between levels).
fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Array(items) => {
            for (k, item) in items.iter().enumerate() {
                flatten_into(&format!("{prefix}_{}", k + 1), item, out);
            }
        }
        Value::Object(m) => {
            for (k, item) in m {
                flatten_into(&format!("{prefix}.{k}"), item, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn flat(r: &Record) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (k, v) in r {
        flatten_into(k, v, &mut out);
    }
    out
}

impl Document {
    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("{} {} {}", self.meta.tool, self.meta.version, self.meta.command),
            format!("command line: {}", self.meta.command_line.join(" ")),
            format!("tolerances: {}", compact(&self.meta.tolerances)),
        ];
        if let Some(s) = &self.summary {
            lines.push(format!("summary: {}", compact(s)));
        }
        lines
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).expect("documents serialize");
                out.push(b'\n');
                out
            }
            Format::Csv => {
                let mut out = Vec::new();
                for l in self.header_lines() {
                    writeln!(out, "# {l}").expect("in-memory write");
                }
                let rows: Vec<_> = self.records.iter().map(flat).collect();
                let mut w = csv::Writer::from_writer(out);
                if let Some(first) = rows.first() {
                    w.write_record(first.iter().map(|c| c.0.as_str())).expect("in-memory write");
                }
                for r in &rows {
                    w.write_record(r.iter().map(|c| c.1.as_str())).expect("in-memory write");
                }
                w.into_inner().expect("in-memory write")
            }
            Format::Plot => {
                let mut out = Vec::new();
                for l in self.header_lines() {
                    writeln!(out, "# {l}").expect("in-memory write");
                }
                let rows: Vec<_> = self.records.iter().map(flat).collect();
                if let Some(first) = rows.first() {
                    let names: Vec<&str> = first.iter().map(|c| c.0.as_str()).collect();
                    writeln!(out, "# {}", names.join(" ")).expect("in-memory write");
                }
                // A blank line between u-rows lets gnuplot's splot draw the grid.
                let mut last_i: Option<&Value> = None;
                for (r, cells) in self.records.iter().zip(&rows) {
                    let i = r.get("i");
                    if last_i.is_some() && i != last_i {
                        out.push(b'\n');
                    }
                    last_i = i;
                    let vals: Vec<&str> = cells.iter().map(|c| c.1.as_str()).collect();
                    writeln!(out, "{}", vals.join(" ")).expect("in-memory write");
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc() -> Document {
        let rec = |i: u32, x: f64| {
            json!({"i": i, "x": x, "H": [0.1, 1e-20], "class": "Flat", "ok": true})
                .as_object()
                .unwrap()
                .clone()
        };
        Document {
            meta: Meta {
                tool: "msurf",
                version: "0",
                command: "test".into(),
                command_line: vec!["msurf".into(), "test".into()],
                tolerances: json!({"classify": 1e-9}),
            },
            grid: Grid {
                u: vec![0.0, 1.0],
                v: vec![0.5],
            },
            records: vec![rec(0, 0.1 + 0.2), rec(1, f64::NAN)],
            summary: None,
        }
    }

    #[test]
    fn csv_flattens_arrays_and_keeps_header() {
        let s = String::from_utf8(doc().render(Format::Csv)).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# msurf 0 test"));
        assert_eq!(lines[3], "i,x,H_1,H_2,class,ok");
        assert_eq!(lines[4], "0,0.30000000000000004,0.1,1e-20,Flat,true");
        assert_eq!(lines[5], "1,nan,0.1,1e-20,Flat,true");
    }

    #[test]
    fn plot_separates_rows() {
        let s = String::from_utf8(doc().render(Format::Plot)).unwrap();
        assert!(s.contains("# i x H_1 H_2 class ok\n0 0.30000000000000004"));
        assert!(s.contains("true\n\n1 nan"));
    }

    #[test]
    fn json_round_trips_numbers() {
        let s = String::from_utf8(doc().render(Format::Json)).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["records"][0]["x"].as_f64().unwrap(), 0.1 + 0.2);
        assert!(v["records"][1]["x"].is_null());
    }
}
