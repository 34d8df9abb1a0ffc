//! Tabular results and their CSV and JSON encodings.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_finite() => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Float(_) | Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) if x.is_finite() => Value::Number(number(*x)),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Float(_) | Cell::Empty => Value::Null,
        }
    }
}

/// Seventeen significant digits in scientific notation, independent of locale.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

fn number(x: f64) -> Number {
    format_float(x).parse().expect("formatted float is a JSON number")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: Cell) {
        self.meta.push((key.to_string(), value));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let rows: Vec<Value> =
            self.rows.iter().map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect())).collect();
        let mut obj = Map::new();
        obj.insert("meta".into(), Value::Object(meta));
        obj.insert("rows".into(), Value::Array(rows));
        let mut out = serde_json::to_vec_pretty(&Value::Object(obj)).expect("JSON values serialize");
        out.push(b'\n');
        out
    }

    pub fn encode(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["i", "x", "s", "b"]);
        t.meta("omega", Cell::Float(1.0));
        t.push(vec![Cell::Int(0), Cell::Float(-0.1), Cell::text("a,b"), Cell::Bool(true)]);
        t.push(vec![Cell::Int(1), Cell::Float(f64::NAN), Cell::Empty, Cell::Bool(false)]);
        t
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e+0");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn csv_uses_newlines_and_quotes() {
        let s = String::from_utf8(sample().to_csv()).unwrap();
        assert_eq!(s, "i,x,s,b\n0,-1.0000000000000001e-1,\"a,b\",true\n1,,,false\n");
    }

    #[test]
    fn json_keeps_float_text() {
        let s = String::from_utf8(sample().to_json()).unwrap();
        assert!(s.contains("\"x\": -1.0000000000000001e-1"));
        assert!(s.contains("\"x\": null"));
        assert!(s.contains("\"omega\": 1.0000000000000000e+0"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
