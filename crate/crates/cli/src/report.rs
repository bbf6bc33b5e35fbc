//! Suite results, CSV tables and the JSON summary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use fofana_core::Exponents;

use crate::config::ExperimentConfig;
use crate::error::LabError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One pass/fail gate: `value relation threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::AtMost, threshold, pass: value <= threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::AtLeast, threshold, pass: value >= threshold }
    }

    /// A structural condition; `value` is 1 when it holds.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

/// Columns shared by every suite table.
pub const HEADER: [&str; 11] =
    ["section", "function", "p", "q", "alpha", "parameter", "value", "reference", "defect", "pass", "note"];

/// One table row; absent fields render as empty cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    pub section: String,
    pub function: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub parameter: Option<f64>,
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub defect: Option<f64>,
    pub pass: Option<bool>,
    pub note: String,
}

impl Record {
    pub fn new(section: &str, function: &str) -> Self {
        Self { section: section.to_string(), function: function.to_string(), ..Self::default() }
    }

    pub fn exponents(mut self, e: &Exponents) -> Self {
        (self.p, self.q, self.alpha) = (Some(e.p()), Some(e.q()), Some(e.alpha()));
        self
    }

    /// Amalgam exponents without a dilation exponent.
    pub fn lebesgue(mut self, p: f64, q: f64) -> Self {
        (self.p, self.q) = (Some(p), Some(q));
        self
    }

    pub fn parameter(mut self, v: f64) -> Self {
        self.parameter = Some(v);
        self
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn reference(mut self, v: f64) -> Self {
        self.reference = Some(v);
        self
    }

    pub fn defect(mut self, v: f64) -> Self {
        self.defect = Some(v);
        self
    }

    pub fn pass(mut self, ok: bool) -> Self {
        self.pass = Some(ok);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn cells(&self) -> [String; 11] {
        let num = |v: Option<f64>| v.map(render_f64).unwrap_or_default();
        [
            self.section.clone(),
            self.function.clone(),
            num(self.p),
            num(self.q),
            num(self.alpha),
            num(self.parameter),
            num(self.value),
            num(self.reference),
            num(self.defect),
            self.pass.map(|b| b.to_string()).unwrap_or_default(),
            self.note.clone(),
        ]
    }
}

/// Shortest representation that reads back to the same double.
pub fn render_f64(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub records: Vec<Record>,
    pub checks: Vec<Check>,
    /// Logged quantities tracked across runs by `diff`.
    pub bands: BTreeMap<String, f64>,
}

impl SuiteResult {
    pub fn new(name: &'static str) -> Self {
        Self { name, records: Vec::new(), checks: Vec::new(), bands: BTreeMap::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn band(&mut self, key: impl Into<String>, value: f64) {
        self.bands.insert(key.into(), value);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_csv(&self) -> Result<String, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| LabError::Io(e.to_string());
        w.write_record(HEADER).map_err(io)?;
        for r in &self.records {
            w.write_record(r.cells()).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub passed: bool,
    pub rows: usize,
    pub checks: Vec<Check>,
    pub bands: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub fofana_lab: String,
    pub fofana_core: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub versions: Versions,
    pub config: ExperimentConfig,
    pub suites: BTreeMap<String, SuiteSummary>,
    pub passed: bool,
}

impl Summary {
    pub fn new(config: ExperimentConfig, results: &[SuiteResult]) -> Self {
        let suites: BTreeMap<String, SuiteSummary> = results
            .iter()
            .map(|r| {
                let s = SuiteSummary { passed: r.passed(), rows: r.records.len(), checks: r.checks.clone(), bands: r.bands.clone() };
                (r.name.to_string(), s)
            })
            .collect();
        let passed = suites.values().all(|s| s.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            versions: Versions {
                fofana_lab: env!("CARGO_PKG_VERSION").to_string(),
                fofana_core: fofana_core::VERSION.to_string(),
            },
            config,
            suites,
            passed,
        }
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        serde_json::to_string_pretty(self).map_err(|e| LabError::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| LabError::Incompatible(format!("summary: {e}")))?;
        let version = v.get("schema_version").and_then(|s| s.as_u64());
        if version != Some(SCHEMA_VERSION as u64) {
            return Err(LabError::Incompatible(format!("summary schema version {version:?}, expected {SCHEMA_VERSION}")));
        }
        serde_json::from_value(v).map_err(|e| LabError::Incompatible(format!("summary: {e}")))
    }
}
