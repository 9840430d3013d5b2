//! Scenario configuration documents.
//!
//! A document is TOML with three fixed sections and repeated bump tables:
//!
//! ```toml
//! [scenario]
//! name = "conservation"
//! mode = "radial"            # or "cartesian-2d"
//! T = 40.0
//! sigma_samples = [-2.0, -1.0, 0.0, 0.5]
//! theta_samples = [0.0]
//! output = "out/conservation"
//! t_eval_factor = 4.0        # m is read off at t = t_eval_factor / ε
//! refinements = 3
//!
//! [grid]
//! h = 0.01                   # default R₀/128
//! cfl = 0.45
//!
//! [data]
//! epsilon = 0.3              # scalar, array, or "0.4, 0.2" string
//!
//! [[data.bump]]
//! component = 1
//! kind = "f"
//! center = [0.0, 0.0]
//! radius = 1.0
//! amplitude = 1.0
//!
//! [thresholds]
//! drift = 5e-3
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::bump::{BumpSpec, BumpSum};
use super::data::{ComponentData, InitialData};
use super::ConfigError;

pub const DEFAULT_CFL: f64 = 0.45;
pub const MAX_CFL_CARTESIAN: f64 = 0.45;
pub const MAX_CFL_RADIAL: f64 = 0.9;
/// Default grid spacing is `R₀ / DEFAULT_CELLS_PER_SUPPORT`.
pub const DEFAULT_CELLS_PER_SUPPORT: f64 = 128.0;
pub const DEFAULT_T_EVAL_FACTOR: f64 = 4.0;
pub const DEFAULT_FINAL_TIME: f64 = 10.0;
pub const DEFAULT_SIGMA_SAMPLES: [f64; 4] = [-2.0, -1.0, 0.0, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMode {
    #[serde(rename = "cartesian-2d")]
    Cartesian2d,
    #[serde(rename = "radial")]
    Radial,
}

impl SolverMode {
    pub fn max_cfl(self) -> f64 {
        match self {
            SolverMode::Cartesian2d => MAX_CFL_CARTESIAN,
            SolverMode::Radial => MAX_CFL_RADIAL,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolverMode::Cartesian2d => "cartesian-2d",
            SolverMode::Radial => "radial",
        }
    }
}

impl std::str::FromStr for SolverMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cartesian-2d" | "cartesian" | "2d" => Ok(SolverMode::Cartesian2d),
            "radial" => Ok(SolverMode::Radial),
            other => Err(format!("unknown solver mode {other:?}")),
        }
    }
}

/// Fully validated scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Data at the first entry of `epsilons`.
    pub data: InitialData,
    pub epsilons: Vec<f64>,
    pub h: f64,
    pub cfl: f64,
    /// Half-width of the computational domain; derived from `R₀ + T` when absent.
    pub extent: Option<f64>,
    pub final_time: f64,
    pub sigma_samples: Vec<f64>,
    pub theta_samples: Vec<f64>,
    pub mode: SolverMode,
    pub output_dir: PathBuf,
    pub t_eval_factor: f64,
    pub refinements: usize,
    /// Pass thresholds overriding the scenario defaults, keyed by assertion name.
    pub thresholds: BTreeMap<String, f64>,
}

impl ScenarioConfig {
    pub fn threshold(&self, key: &str, default: f64) -> f64 {
        self.thresholds.get(key).copied().unwrap_or(default)
    }

    pub fn support_radius(&self) -> f64 {
        self.data.support_radius()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    scenario: RawScenario,
    #[serde(default)]
    grid: RawGrid,
    data: RawData,
    #[serde(default)]
    thresholds: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    mode: Option<String>,
    #[serde(rename = "T")]
    final_time: Option<f64>,
    sigma_samples: Option<Vec<f64>>,
    theta_samples: Option<Vec<f64>>,
    output: Option<String>,
    t_eval_factor: Option<f64>,
    refinements: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    h: Option<f64>,
    cfl: Option<f64>,
    extent: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    epsilon: RawEpsilon,
    #[serde(default)]
    bump: Vec<RawBump>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawEpsilon {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBump {
    component: i64,
    kind: String,
    center: [f64; 2],
    radius: f64,
    amplitude: f64,
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn parse_error(text: &str, err: toml::de::Error) -> ConfigError {
    let (line, column) = match err.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    };
    ConfigError::Parse {
        line,
        column,
        message: err.message().to_string(),
    }
}

/// Parses and validates a configuration document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    build(raw)
}

/// Parses a document after applying `section.key = value` overrides, where each
/// value is a TOML literal (bare words are treated as strings).
pub fn parse_scenario_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<ScenarioConfig, ConfigError> {
    if overrides.is_empty() {
        return parse_scenario(text);
    }
    let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    for (key, value) in overrides {
        apply_override(&mut table, key, value)?;
    }
    let raw: RawDocument = table.try_into().map_err(|e: toml::de::Error| ConfigError::Parse {
        line: 0,
        column: 0,
        message: e.message().to_string(),
    })?;
    build(raw)
}

fn parse_literal(value: &str) -> toml::Value {
    let doc = format!("v = {value}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(value.into())),
        Err(_) => toml::Value::String(value.to_string()),
    }
}

fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<(), ConfigError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| invalid(key, "empty key"))?;
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| invalid(key, format!("{part} is not a table")))?;
    }
    cursor.insert(leaf.to_string(), parse_literal(value));
    Ok(())
}

fn parse_epsilons(raw: RawEpsilon) -> Result<Vec<f64>, ConfigError> {
    let list = match raw {
        RawEpsilon::One(e) => vec![e],
        RawEpsilon::Many(v) => v,
        RawEpsilon::Text(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid("epsilon", format!("cannot parse {p:?} as a number")))
            })
            .collect::<Result<_, _>>()?,
    };
    if list.is_empty() {
        return Err(invalid("epsilon", "at least one value required"));
    }
    if let Some(bad) = list.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(invalid("epsilon", format!("must be positive, got {bad}")));
    }
    Ok(list)
}

fn build(raw: RawDocument) -> Result<ScenarioConfig, ConfigError> {
    let epsilons = parse_epsilons(raw.data.epsilon)?;

    let mut components: [ComponentData; 2] = Default::default();
    for (i, b) in raw.data.bump.iter().enumerate() {
        let field = format!("data.bump[{i}]");
        if !(b.radius > 0.0) || !b.radius.is_finite() {
            return Err(invalid(
                &format!("{field}.radius"),
                format!("must be positive, got {}", b.radius),
            ));
        }
        if !b.amplitude.is_finite() || !b.center.iter().all(|c| c.is_finite()) {
            return Err(invalid(&field, "center and amplitude must be finite"));
        }
        let j = match b.component {
            1 => 0,
            2 => 1,
            c => return Err(invalid(&format!("{field}.component"), format!("must be 1 or 2, got {c}"))),
        };
        let spec = BumpSpec {
            center: b.center,
            radius: b.radius,
            amplitude: b.amplitude,
        };
        match b.kind.as_str() {
            "f" => components[j].f.0.push(spec),
            "g" => components[j].g.0.push(spec),
            k => return Err(invalid(&format!("{field}.kind"), format!("must be \"f\" or \"g\", got {k:?}"))),
        }
    }
    let data = InitialData {
        components: components.map(|c| ComponentData {
            f: BumpSum(c.f.0),
            g: BumpSum(c.g.0),
        }),
        epsilon: epsilons[0],
    };

    let mode = match raw.scenario.mode.as_deref() {
        None => SolverMode::Radial,
        Some(m) => m.parse().map_err(|e: String| invalid("mode", e))?,
    };
    if mode == SolverMode::Radial && !data.is_radial() {
        return Err(invalid("mode", "radial mode requires every bump centered at the origin"));
    }

    let r0 = data.support_radius();
    let h = match raw.grid.h {
        Some(h) => h,
        None if r0 > 0.0 => r0 / DEFAULT_CELLS_PER_SUPPORT,
        None => return Err(invalid("h", "no bumps given, so no default spacing can be derived")),
    };
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid("h", format!("must be positive, got {h}")));
    }
    let cfl = raw.grid.cfl.unwrap_or(DEFAULT_CFL);
    if !(cfl > 0.0) || cfl > mode.max_cfl() {
        return Err(invalid(
            "cfl",
            format!("must lie in (0, {}] for {} mode, got {cfl}", mode.max_cfl(), mode.as_str()),
        ));
    }
    let final_time = raw.scenario.final_time.unwrap_or(DEFAULT_FINAL_TIME);
    if !(final_time > 0.0) || !final_time.is_finite() {
        return Err(invalid("T", format!("must be positive, got {final_time}")));
    }
    if let Some(extent) = raw.grid.extent {
        if !(extent > 0.0) {
            return Err(invalid("extent", format!("must be positive, got {extent}")));
        }
    }
    let sigma_samples = raw.scenario.sigma_samples.unwrap_or_else(|| DEFAULT_SIGMA_SAMPLES.to_vec());
    if !sigma_samples.iter().all(|s| s.is_finite()) {
        return Err(invalid("sigma_samples", "all samples must be finite"));
    }
    let theta_samples = raw.scenario.theta_samples.unwrap_or_else(|| vec![0.0]);
    if theta_samples.is_empty() || !theta_samples.iter().all(|s| s.is_finite()) {
        return Err(invalid("theta_samples", "need at least one finite angle"));
    }
    let t_eval_factor = raw.scenario.t_eval_factor.unwrap_or(DEFAULT_T_EVAL_FACTOR);
    if !(t_eval_factor > 0.0) {
        return Err(invalid("t_eval_factor", "must be positive"));
    }
    let refinements = raw.scenario.refinements.unwrap_or(3);
    if refinements < 2 {
        return Err(invalid("refinements", "at least two levels are needed for an order estimate"));
    }
    let output_dir = PathBuf::from(
        raw.scenario
            .output
            .unwrap_or_else(|| format!("out/{}", raw.scenario.name)),
    );

    Ok(ScenarioConfig {
        name: raw.scenario.name,
        data,
        epsilons,
        h,
        cfl,
        extent: raw.grid.extent,
        final_time,
        sigma_samples,
        theta_samples,
        mode,
        output_dir,
        t_eval_factor,
        refinements,
        thresholds: raw.thresholds,
    })
}
