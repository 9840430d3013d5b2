//! Radon transform, half-order integral `R₂`, and the Friedlander radiation
//! field `F₀[φ,ψ] = −∂σR₂[φ] + R₂[ψ]` with its σ-derivative.

mod abel;
mod decay;
mod radon;
mod table;

pub use abel::{half_integral_r2, half_integral_r2_multi, ABEL_NODES_PER_UNIT};
pub use decay::{fit_sigma_decay, japanese_bracket, DecayFit, MIN_FIT_POINTS};
pub use radon::{bump_line_jets, radon_line_integral, radon_line_jets, DirectionalOrder, LINE_NODES_PER_RADIUS};
pub use table::{
    component_radiation, default_sigma_grid, default_theta_grid, equispaced_angles, friedlander_table,
    RadiationSample, RadiationTable, DEFAULT_SIGMA_MIN, DEFAULT_SIGMA_STEP, DEFAULT_THETA_COUNT,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadiationError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("non-finite radiation value at sigma={sigma}, theta={theta}")]
    NonFinite { sigma: f64, theta: f64 },
    #[error("sigma={sigma} lies outside the tabulated range [{lo}, {hi}]")]
    Extrapolation { sigma: f64, lo: f64, hi: f64 },
    #[error("fit window [{lo}, {hi}] must be non-empty and lie below -2R0 = {far}")]
    InvalidWindow { lo: f64, hi: f64, far: f64 },
    #[error("degenerate decay fit for component {component} at theta={theta}: {points} usable points")]
    DegenerateFit { component: usize, theta: f64, points: usize },
}
