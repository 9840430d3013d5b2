use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// One checked property of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Assertion {
    fn bounded(name: &str, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = value.is_finite() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Assertion {
            name: name.to_string(),
            value,
            lower,
            upper,
            pass,
            note: None,
        }
    }

    pub fn at_most(name: &str, value: f64, upper: f64) -> Self {
        Self::bounded(name, value, None, Some(upper))
    }

    pub fn at_least(name: &str, value: f64, lower: f64) -> Self {
        Self::bounded(name, value, Some(lower), None)
    }

    pub fn within(name: &str, value: f64, lower: f64, upper: f64) -> Self {
        Self::bounded(name, value, Some(lower), Some(upper))
    }

    /// Boolean check recorded as value 1 (holds) or 0.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::bounded(name, if ok { 1.0 } else { 0.0 }, Some(1.0), None)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Contents of `summary.json`. Deterministic for a fixed configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub pass: bool,
    pub assertions: Vec<Assertion>,
    pub values: BTreeMap<String, Value>,
}

impl Summary {
    pub fn failing(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

/// Wall-clock seconds per stage, written to `timing.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub stages: Vec<(String, f64)>,
}

/// Accumulates assertions, values and timings while a scenario runs.
#[derive(Debug)]
pub struct Report {
    scenario: String,
    assertions: Vec<Assertion>,
    values: BTreeMap<String, Value>,
    started: Instant,
    stages: Vec<(String, f64)>,
}

impl Report {
    pub fn new(scenario: &str) -> Self {
        Report {
            scenario: scenario.to_string(),
            assertions: Vec::new(),
            values: BTreeMap::new(),
            started: Instant::now(),
            stages: Vec::new(),
        }
    }

    pub fn check(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.values.insert(key.to_string(), v);
    }

    /// Runs `f` and records its duration under `stage`.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.stages.push((stage.to_string(), t.elapsed().as_secs_f64()));
        out
    }

    pub fn finish(self) -> (Summary, Timing) {
        let pass = !self.assertions.is_empty() && self.assertions.iter().all(|a| a.pass);
        (
            Summary {
                scenario: self.scenario,
                pass,
                assertions: self.assertions,
                values: self.values,
            },
            Timing {
                total_seconds: self.started.elapsed().as_secs_f64(),
                stages: self.stages,
            },
        )
    }
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()
}

/// Writes a CSV file from a header and rows of already formatted fields.
pub(crate) fn write_rows(path: &Path, header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

/// Creates `path` and hands a buffered writer to `f`.
pub(crate) fn write_with(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
) -> std::io::Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    f(&mut out)?;
    out.flush()
}
