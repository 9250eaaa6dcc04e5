//! CSV and JSON emitters with byte-stable formatting.

use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct IoError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Header line, then one line per record. `comment` lines go first, prefixed with `# `.
pub fn csv_bytes(header: &[&str], records: &[Vec<Cell>], comment: Option<&str>) -> Vec<u8> {
    let mut buf = Vec::new();
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(buf, "# {line}").expect("write to memory");
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf);
    w.write_record(header).expect("write to memory");
    for r in records {
        w.write_record(r.iter().map(Cell::render))
            .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let v: Value = serde_json::to_value(value).expect("serializable");
    let mut out = serde_json::to_vec_pretty(&sort_keys(v)).expect("serializable");
    out.push(b'\n');
    out
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let sorted: std::collections::BTreeMap<String, Value> =
                map.into_iter().map(|(k, v)| (k, sort_keys(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Write to `path`, or stdout when `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), IoError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| IoError {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| IoError {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_records_give_header_only() {
        let out = csv_bytes(&["lambda", "delta"], &[], None);
        assert_eq!(String::from_utf8(out).unwrap(), "lambda,delta\n");
    }

    #[test]
    fn one_row_has_seventeen_digits() {
        let out = csv_bytes(
            &["lambda", "delta"],
            &[vec![0.1.into(), (-2.0).into()]],
            None,
        );
        let text = String::from_utf8(out).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "1.0000000000000001e-1,-2.0000000000000000e0");
        let mantissa = line.split(',').next().unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        assert_eq!(line.split(',').next().unwrap().parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn comment_precedes_header() {
        let out = csv_bytes(&["n"], &[vec![3i64.into()]], Some("config: {}"));
        assert_eq!(String::from_utf8(out).unwrap(), "# config: {}\nn\n3\n");
    }

    #[test]
    fn json_keys_sorted() {
        let v = serde_json::json!({"b": 1, "a": {"z": 2, "c": 3}});
        let text = String::from_utf8(json_bytes(&v)).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"c\"").unwrap() < text.find("\"z\"").unwrap());
    }

    #[test]
    fn identical_inputs_identical_bytes() {
        let rows = vec![vec![Cell::Float(1.0 / 3.0), Cell::Text("stable".into())]];
        assert_eq!(
            csv_bytes(&["x", "s"], &rows, Some("c")),
            csv_bytes(&["x", "s"], &rows, Some("c"))
        );
    }
}
