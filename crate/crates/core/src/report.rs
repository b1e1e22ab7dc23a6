//! Machine-readable run reports: one JSON object per run, or a CSV table.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::Result;

/// Header plus numeric rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// `.` decimal separator, LF line endings; floats in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => crate::Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub tolerances: Map<String, Value>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
    #[serde(skip)]
    pub table: Table,
    /// A contract (tolerance, certification) failed.
    #[serde(skip)]
    pub failed: bool,
}

impl Report {
    pub fn new(command: &str, params: Value) -> Self {
        Report {
            command: command.to_string(),
            params,
            results: Value::Null,
            tolerances: Map::new(),
            warnings: Vec::new(),
            errors: Vec::new(),
            table: Table::default(),
            failed: false,
        }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), Value::from(value));
    }

    /// Records a contract check; a failing one sets `failed` and an error entry.
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failed = true;
            self.errors.push(what.into());
        }
    }

    pub fn error(&mut self, e: &crate::Error) {
        self.failed = true;
        self.errors.push(e.to_string());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_is_lf_and_round_trips() {
        let mut t = Table::new(["n", "value"]);
        t.push(vec![1.0, 0.1]);
        t.push(vec![2.0, 1e-300]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "n,value\n1.0,0.1\n2.0,1e-300\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn json_field_order_and_failure() {
        let mut r = Report::new("spectrum", json!({ "alpha": 0.5 }));
        r.results = json!([0.5]);
        r.tolerance("tol", 1e-8);
        r.check(true, "fine");
        assert_eq!(r.exit_code(), 0);
        r.check(false, "residual above tolerance");
        assert_eq!(r.exit_code(), 1);
        let s = r.to_json();
        let keys = ["\"command\"", "\"params\"", "\"results\"", "\"tolerances\"", "\"warnings\"", "\"errors\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.ends_with("}\n"));
    }
}
