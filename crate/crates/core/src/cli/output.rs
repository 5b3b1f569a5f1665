use serde_json::{json, Map, Value};

use super::{Format, RunConfig};
use crate::model::{EmitterArray, Grid};
use crate::validation::ValidationReport;

const UNITS_NOTE: &str = "all quantities are expressed in the units of κ: frequencies in κ, coordinates in 1/κ";

pub(super) enum Column {
    Real(Vec<f64>),
    Flag(Vec<bool>),
    Count(Vec<u64>),
}

impl Column {
    fn cell(&self, row: usize) -> String {
        match self {
            Column::Real(v) => format!("{:.16e}", v[row]),
            Column::Flag(v) => v[row].to_string(),
            Column::Count(v) => v[row].to_string(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Column::Real(v) => v.len(),
            Column::Flag(v) => v.len(),
            Column::Count(v) => v.len(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Column::Real(v) => json!(v),
            Column::Flag(v) => json!(v),
            Column::Count(v) => json!(v),
        }
    }
}

pub(super) struct Table {
    command: String,
    params: Map<String, Value>,
    meta: Vec<(String, String)>,
    columns: Vec<(&'static str, Column)>,
}

impl Table {
    /// Echoes every parameter that influences the numbers, with the grid and
    /// emitters as actually used.
    /// `emitters` is `None` when they are drawn per sample.
    pub fn new(cfg: &RunConfig, grid: &Grid, emitters: Option<&EmitterArray>) -> Self {
        let mut params = match serde_json::to_value(cfg).expect("config serializes") {
            Value::Object(map) => map,
            _ => unreachable!("config is a struct"),
        };
        for key in ["command", "out", "format", "filter", "tolerances"] {
            params.remove(key);
        }
        params.insert("grid".into(), json!(format!("{}:{}:{}", grid.start(), grid.stop(), grid.n_points())));
        if let Some(e) = emitters {
            params.insert("m".into(), json!(e.len()));
            params.insert("detunings".into(), json!(e.detunings()));
        } else {
            params.remove("detunings");
        }
        params.insert("kappa".into(), json!(1.0));
        Self {
            command: format!("{:?}", cfg.command).to_lowercase(),
            params,
            meta: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &'static str, column: Column) {
        self.columns.push((name, column));
    }

    pub fn meta(&mut self, key: &str, value: String) {
        self.meta.push((key.to_string(), value));
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> Vec<u8> {
        let mut out = format!("# chiral-scatter {}\n# {UNITS_NOTE}\n", self.command);
        for (k, v) in &self.params {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        let mut w = csv::Writer::from_writer(out.into_bytes());
        w.write_record(self.columns.iter().map(|c| c.0)).expect("in-memory write");
        let rows = self.columns.first().map_or(0, |c| c.1.len());
        for r in 0..rows {
            w.write_record(self.columns.iter().map(|c| c.1.cell(r))).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    fn json(&self) -> Vec<u8> {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|(name, c)| json!({ "name": name, "values": c.json() }))
            .collect();
        let doc = json!({
            "command": self.command,
            "units": UNITS_NOTE,
            "parameters": self.params,
            "metadata": meta,
            "columns": columns,
        });
        let mut v = serde_json::to_vec_pretty(&doc).expect("document serializes");
        v.push(b'\n');
        v
    }
}

pub(super) fn report_csv(report: &ValidationReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "criterion", "check", "measured", "bound", "passed", "note"])
        .expect("in-memory write");
    for c in &report.criteria {
        for check in &c.checks {
            w.write_record([
                c.id.to_string(),
                c.name.clone(),
                check.name.clone(),
                format!("{:.16e}", check.measured),
                check.bound.clone(),
                check.passed.to_string(),
                check.note.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}
