//! Named experiments, power-law fits and report files.
//!
//! Every scenario writes its CSVs, a deterministic `summary.json` with one
//! entry per assertion, and a `timing.json` with wall-clock stage times into
//! the output directory.

mod conservation;
mod decay;
mod free;
mod nondecay;
mod ode;
mod power;
mod report;
mod scaling;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

pub use power::{fit_power_law, PowerLawFit};
pub use report::{Assertion, Report, Summary, Timing};
pub use scaling::{ScalingCase, ScalingReport};

use crate::model::{parse_scenario_with_overrides, ConfigError, ScenarioConfig};
use crate::profile::ProfileError;
use crate::radiation::RadiationError;
use crate::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("unknown scenario {0:?}; expected one of {list}", list = Scenario::NAMES.join(", "))]
    UnknownScenario(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Radiation(#[from] RadiationError),
    #[error("writing reports: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Conservation,
    FreeValidation,
    RadiationDecay,
    ProfileOracle,
    EpsilonScaling,
    NondecayDemo,
    SymmetricDecay,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Conservation,
        Scenario::FreeValidation,
        Scenario::RadiationDecay,
        Scenario::ProfileOracle,
        Scenario::EpsilonScaling,
        Scenario::NondecayDemo,
        Scenario::SymmetricDecay,
    ];

    pub const NAMES: [&'static str; 7] = [
        "conservation",
        "free-validation",
        "radiation-decay",
        "profile-oracle",
        "epsilon-scaling",
        "nondecay-demo",
        "symmetric-decay",
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    /// Built-in configuration document.
    pub fn default_config(self) -> &'static str {
        match self {
            Scenario::Conservation => include_str!("../../scenarios/conservation.toml"),
            Scenario::FreeValidation => include_str!("../../scenarios/free-validation.toml"),
            Scenario::RadiationDecay => include_str!("../../scenarios/radiation-decay.toml"),
            Scenario::ProfileOracle => include_str!("../../scenarios/profile-oracle.toml"),
            Scenario::EpsilonScaling => include_str!("../../scenarios/epsilon-scaling.toml"),
            Scenario::NondecayDemo => include_str!("../../scenarios/nondecay-demo.toml"),
            Scenario::SymmetricDecay => include_str!("../../scenarios/symmetric-decay.toml"),
        }
    }

    /// Parses the built-in document after applying `key = value` overrides.
    pub fn config(self, overrides: &[(String, String)]) -> Result<ScenarioConfig, LabError> {
        Ok(parse_scenario_with_overrides(self.default_config(), overrides)?)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| LabError::UnknownScenario(s.to_string()))
    }
}

/// Runs the experiment named in `config` and writes its reports into `out`.
///
/// Assertion failures are reported through [`Summary::pass`]; errors are
/// reserved for invalid input, numerical breakdown and I/O.
pub fn run_scenario(config: &ScenarioConfig, out: &Path) -> Result<(Summary, Timing), LabError> {
    let scenario: Scenario = config.name.parse()?;
    fs::create_dir_all(out)?;
    let mut report = Report::new(scenario.name());
    match scenario {
        Scenario::Conservation => conservation::run(config, out, &mut report)?,
        Scenario::FreeValidation => free::run(config, out, &mut report)?,
        Scenario::RadiationDecay => decay::run(config, out, &mut report)?,
        Scenario::ProfileOracle => ode::run(config, out, &mut report)?,
        Scenario::EpsilonScaling => scaling::run(config, out, &mut report)?,
        Scenario::NondecayDemo => nondecay::run_nondecay(config, out, &mut report)?,
        Scenario::SymmetricDecay => nondecay::run_symmetric(config, out, &mut report)?,
    }
    let (summary, timing) = report.finish();
    report::write_json(&out.join("summary.json"), &summary)?;
    report::write_json(&out.join("timing.json"), &timing)?;
    Ok((summary, timing))
}

/// Grid spacings `h, h/2, h/4, …` for `config.refinements` levels.
pub(crate) fn refinement_levels(config: &ScenarioConfig) -> Vec<f64> {
    (0..config.refinements).map(|k| config.h / f64::powi(2.0, k as i32)).collect()
}

/// `log₂(e_coarse / e_fine)` for each consecutive pair.
pub(crate) fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Maximum, or NaN when any entry is NaN or the slice is empty.
pub(crate) fn max_or_nan(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return f64::NAN;
    }
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn fmt_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}
