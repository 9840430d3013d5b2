//! Null-ray profiles `V_j(t; σ, ω)`, the remainders `H_j`, `K_j`, `ρ`, the
//! truncated profile system and estimators of the invariant `m(σ, ω)`.

mod estimate;
mod fields;
mod ode;
mod trace;

pub use estimate::{m_leading, write_estimates_csv, MEstimate};
pub use fields::{compute_h, compute_u, sample_v};
pub use ode::{profile_invariant, truncated_profile_closed_form, truncated_profile_solve, ProfilePath, PROFILE_RTOL};
pub use trace::{m_correction, m_correction_tail, t0_sigma, t1_sigma, uniform_times, ProfileSampler, ProfileTrace, Ray};

use crate::radiation::RadiationError;
use crate::solver::SolverError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("point ({}, {}) is closer than h to the origin or off the grid", point[0], point[1])]
    OutOfDomain { point: [f64; 2] },
    #[error("remainder requested at t={t}, before t=2")]
    TooEarly { t: f64 },
    #[error("trace does not cover [{from}, {to}]: {reason}")]
    Coverage { from: f64, to: f64, reason: String },
    #[error("profile integration failed: {0}")]
    Integration(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Radiation(#[from] RadiationError),
}
