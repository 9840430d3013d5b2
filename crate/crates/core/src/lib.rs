//! Numerical laboratory for the two-component cubic semilinear wave system
//!
//! ```text
//! □u₁ = −(∂ₜu₂)² ∂ₜu₁,   □u₂ = −(∂ₜu₁)² ∂ₜu₂,   (t, x) ∈ (0, ∞) × ℝ²
//! ```
//!
//! with small data `(εf_j, εg_j)`. The crate simulates the system, extracts the
//! outgoing profile `V_j(t; σ, ω)` along null rays, and compares the profile
//! invariant `m = V₁² − V₂²` with `ε²((∂σF₁)² − (∂σF₂)²)`, where `F_j` is the
//! Friedlander radiation field of the data.
//!
//! Modules:
//! - [`model`]: bump data families and scenario configuration
//! - [`radiation`]: Radon transform, half-order integral, radiation tables
//! - [`solver`]: leapfrog solver, energies, free-wave oracle
//! - [`profile`]: null-ray profiles, remainders, m-estimates, profile ODE
//! - [`lab`]: scenarios, power-law fits and reports

pub mod fit;
pub mod lab;
pub mod model;
pub mod profile;
pub mod quadrature;
pub mod radiation;
pub mod solver;
