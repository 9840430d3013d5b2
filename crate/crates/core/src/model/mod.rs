//! Initial-data families and scenario configuration.

mod bump;
mod config;
mod data;

pub use bump::{eval_bump, BumpSpec, BumpSum, Jet, MultiIndex, Point};
pub use config::{
    parse_scenario, parse_scenario_with_overrides, ScenarioConfig, SolverMode, DEFAULT_CELLS_PER_SUPPORT,
    DEFAULT_CFL, DEFAULT_FINAL_TIME, DEFAULT_SIGMA_SAMPLES, DEFAULT_T_EVAL_FACTOR, MAX_CFL_CARTESIAN,
    MAX_CFL_RADIAL,
};
pub use data::{build_initial_data, ComponentData, InitialData, InitialValues};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("derivative order ∂₁^{dx}∂₂^{dy} exceeds the supported total order 2")]
    UnsupportedDerivative { dx: u8, dy: u8 },
    #[error("invalid bump: {0}")]
    InvalidBump(String),
    #[error("epsilon must be non-negative and finite, got {0}")]
    InvalidEpsilon(f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}
