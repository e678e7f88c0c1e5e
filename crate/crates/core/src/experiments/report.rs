//! CSV and JSON reports.
//!
//! Columns keep the order they were declared in. CSV floats use 17
//! significant digits (`{:.16e}`) so they parse back to the same bits; JSON
//! floats use the shortest representation that round-trips, non-finite
//! values become `null`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

use super::calibrate::Calibration;
use super::suite::SuiteReport;
use super::sweep::RateFit;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!("unknown report format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(s: &str) -> Cell {
        if s == "true" || s == "false" {
            return Cell::Bool(s == "true");
        }
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        let floaty = s.contains('e') || matches!(s, "NaN" | "inf" | "-inf");
        match s.parse::<f64>() {
            Ok(v) if floaty => Cell::Float(v),
            _ => Cell::Text(s.to_string()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    /// Bitwise equality for floats (`NaN == NaN`).
    pub fn same(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Float(a), Cell::Float(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Cell-wise bitwise equality.
    pub fn same(&self, other: &Table) -> bool {
        self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }
}

fn coords(v: &[f64]) -> String {
    v.iter().map(|c| format!("{c:.16e}")).collect::<Vec<_>>().join(";")
}

impl From<&RateFit> for Table {
    fn from(fit: &RateFit) -> Self {
        let mut t = Table::new(&[
            "index", "param", "t", "x", "y", "delta_x", "delta_y", "delta_mid", "u", "approx", "oracle",
            "oracle_err", "rel_err", "flagged", "note",
        ]);
        for r in &fit.records {
            t.push(vec![
                r.index.into(),
                r.param.into(),
                r.t.into(),
                coords(&r.x).into(),
                coords(&r.y).into(),
                r.delta_x.into(),
                r.delta_y.into(),
                r.delta_mid.into(),
                r.u.into(),
                r.approx.into(),
                r.oracle.into(),
                r.oracle_err.into(),
                r.rel_err.into(),
                r.flagged.into(),
                r.note.clone().into(),
            ]);
        }
        t
    }
}

impl From<&SuiteReport> for Table {
    fn from(rep: &SuiteReport) -> Self {
        let mut t = Table::new(&[
            "name", "ratio", "region", "region_source", "cases", "unresolved", "fitted", "ceiling",
            "ceiling_source", "violations", "pass",
        ]);
        let src = |s| serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        for e in &rep.entries {
            t.push(vec![
                e.name.clone().into(),
                e.ratio.clone().into(),
                e.region.clone().into(),
                src(e.region_source).into(),
                e.cases.into(),
                e.unresolved.into(),
                e.fitted.into(),
                e.ceiling.into(),
                src(e.ceiling_source).into(),
                e.violations.into(),
                e.pass.into(),
            ]);
        }
        t
    }
}

impl From<&Calibration> for Table {
    fn from(c: &Calibration) -> Self {
        let mut t = Table::new(&["approximant", "t", "ratio", "delta", "separation", "rel_err"]);
        for p in &c.points {
            t.push(vec![
                p.approximant.into(),
                p.t.into(),
                p.ratio.into(),
                p.delta.into(),
                p.separation.into(),
                p.rel_err.into(),
            ]);
        }
        t
    }
}

/// Renders `table` with `config` echoed (JSON only; CSV carries the records).
pub fn emit_report(table: &Table, config: &Value, format: Format) -> Result<Vec<u8>> {
    if table.rows.is_empty() {
        return Err(Error::usage("nothing to report: no records"));
    }
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(&table.columns).map_err(io)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::render)).map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.to_string()))
        }
        Format::Json => {
            let records: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let m: Map<String, Value> =
                        table.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                    Value::Object(m)
                })
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "config": config,
                "records": records,
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Parses a CSV report back into a table.
pub fn load_csv(bytes: &[u8]) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().from_reader(bytes);
    let io = |e: csv::Error| Error::Io(e.to_string());
    let columns = r.headers().map_err(io)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(io)?.iter().map(Cell::parse).collect());
    }
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["a", "b", "c", "d"]);
        t.push(vec![0.1.into(), 3usize.into(), "x, \"quoted\"".into(), true.into()]);
        t.push(vec![(1.0 / 3.0).into(), 0usize.into(), "".into(), false.into()]);
        t.push(vec![f64::NAN.into(), 7usize.into(), "plain".into(), false.into()]);
        t.push(vec![(-2.5e-300).into(), 1usize.into(), "1e5x".into(), true.into()]);
        t
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let t = sample();
        let bytes = emit_report(&t, &json!({}), Format::Csv).unwrap();
        let back = load_csv(&bytes).unwrap();
        assert!(t.same(&back), "{back:?}");
        assert!(!bytes.contains(&b'\r'));
        assert!(String::from_utf8(bytes).unwrap().starts_with("a,b,c,d\n1.0000000000000001e-1,"));
    }

    #[test]
    fn json_is_versioned_and_deterministic() {
        let t = sample();
        let cfg = json!({"seed": 7});
        let a = emit_report(&t, &cfg, Format::Json).unwrap();
        assert_eq!(a, emit_report(&t, &cfg, Format::Json).unwrap());
        let v: Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["config"]["seed"], 7);
        assert_eq!(v["records"][1]["a"].as_f64().unwrap(), 1.0 / 3.0);
        assert!(v["records"][2]["a"].is_null());
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["schema_version", "config", "records"]);
    }

    #[test]
    fn empty_and_unknown_format_are_usage_errors() {
        let t = Table::new(&["a"]);
        assert!(matches!(emit_report(&t, &json!({}), Format::Csv), Err(Error::Usage(_))));
        assert!(matches!("xml".parse::<Format>(), Err(Error::Usage(_))));
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
    }
}
