//! Leapfrog time integration of the free and nonlinear systems in Cartesian 2D
//! and radially symmetric modes, energy diagnostics and the free-wave oracle.

mod energy;
mod grid;
mod interp;
mod oracle;
mod run;
mod snapshot;
mod state;

pub use energy::{energies_and_dissipation, Energies, EnergyRecord, EnergyTrace};
pub use grid::{Geometry, MARGIN_CELLS};
pub use interp::{local_fields, LocalFields};
pub use oracle::{free_oracle_eval, free_oracle_eval_with, FreeValues, OracleResolution};
pub use run::{run_simulation, Sampler, DEFAULT_ENERGY_CADENCE};
pub use snapshot::write_snapshot;
pub use state::{init_state, time_step, FieldState, CORRECTOR_PASSES};

use crate::model::{ScenarioConfig, SolverMode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("domain extent {extent} is smaller than R0 + T + 2h = {required}")]
    DomainTooSmall { extent: f64, required: f64 },
    #[error("non-finite value at x=({}, {}); last stable time t={last_stable_time}", position[0], position[1])]
    Unstable { last_stable_time: f64, position: [f64; 2] },
    #[error("point ({}, {}) lies outside the sampling region", point[0], point[1])]
    OutOfDomain { point: [f64; 2] },
    #[error("sample time {time} outside [0, {final_time}]")]
    SampleTime { time: f64, final_time: f64 },
    #[error("sampler failed: {0}")]
    Sampler(String),
}

/// Numerical parameters of a single run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSetup {
    pub mode: SolverMode,
    pub h: f64,
    pub cfl: f64,
    pub final_time: f64,
    /// Half-width of the domain; `R₀ + T + 2h` when absent.
    pub extent: Option<f64>,
    /// Spacing of the recorded energy trace.
    pub energy_cadence: f64,
}

impl RunSetup {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        RunSetup {
            mode: config.mode,
            h: config.h,
            cfl: config.cfl,
            final_time: config.final_time,
            extent: config.extent,
            energy_cadence: DEFAULT_ENERGY_CADENCE,
        }
    }

    pub fn new(mode: SolverMode, h: f64, final_time: f64) -> Self {
        RunSetup {
            mode,
            h,
            cfl: crate::model::DEFAULT_CFL,
            final_time,
            extent: None,
            energy_cadence: DEFAULT_ENERGY_CADENCE,
        }
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_final_time(mut self, t: f64) -> Self {
        self.final_time = t;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(SolverError::Config(format!("grid spacing must be positive, got {}", self.h)));
        }
        if !(self.cfl > 0.0 && self.cfl <= self.mode.max_cfl()) {
            return Err(SolverError::Config(format!(
                "CFL {} outside (0, {}] for {} mode",
                self.cfl,
                self.mode.max_cfl(),
                self.mode.as_str()
            )));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return Err(SolverError::Config(format!("final time must be non-negative, got {}", self.final_time)));
        }
        if !(self.energy_cadence > 0.0) {
            return Err(SolverError::Config("energy cadence must be positive".into()));
        }
        Ok(())
    }
}
