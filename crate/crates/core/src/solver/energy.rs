use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::state::FieldState;
use crate::model::SolverMode;
use crate::quadrature::pairwise_sum;

/// Squared energy norms and the dissipation integrand at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Energies {
    pub e1sq: f64,
    pub e2sq: f64,
    /// `∫(∂ₜu₁)²(∂ₜu₂)² dx`
    pub dissipation: f64,
}

/// `E_j² = ½∫|∂u_j|² dx` with the cached `∂ₜu_j` and forward space differences
/// (the summation-by-parts partner of the discrete Laplacian), plus the
/// dissipation integrand.
pub fn energies_and_dissipation(state: &FieldState) -> Energies {
    let g = state.geometry();
    let h = g.h;
    let inv_h = 1.0 / h;
    let [e1sq, e2sq] = [0, 1].map(|j| {
        let u = state.field(j);
        let v = state.velocity(j);
        match g.mode {
            SolverMode::Cartesian2d => {
                let n = g.n;
                let rows: Vec<f64> = (1..n - 1)
                    .into_par_iter()
                    .map(|row| {
                        let mut acc = 0.0;
                        for i in 1..n - 1 {
                            let k = row * n + i;
                            let ux = (u[k + 1] - u[k]) * inv_h;
                            let uy = (u[k + n] - u[k]) * inv_h;
                            acc += v[k] * v[k] + ux * ux + uy * uy;
                        }
                        acc
                    })
                    .collect();
                0.5 * h * h * pairwise_sum(&rows)
            }
            SolverMode::Radial => {
                let n = g.n;
                let terms: Vec<f64> = (0..n)
                    .map(|i| {
                        let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                        let ur = (right - u[i]) * inv_h;
                        v[i] * v[i] * g.coord(i) + ur * ur * (i as f64 + 1.0) * h
                    })
                    .collect();
                0.5 * 2.0 * std::f64::consts::PI * h * pairwise_sum(&terms)
            }
        }
    });
    Energies {
        e1sq,
        e2sq,
        dissipation: state.dissipation(),
    }
}

/// One row of the energy trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub e1sq: f64,
    pub e2sq: f64,
    pub dissipation: f64,
    /// `∫₀ᵗ D`
    pub cum_dissipation: f64,
}

impl EnergyRecord {
    pub fn diff(&self) -> f64 {
        self.e1sq - self.e2sq
    }

    pub fn sum(&self) -> f64 {
        self.e1sq + self.e2sq
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EnergyTrace {
    pub records: Vec<EnergyRecord>,
}

impl EnergyTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&EnergyRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&EnergyRecord> {
        self.records.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// `max_t |(E1²−E2²)(t) − (E1²−E2²)(0)| / max(E1²(0), 1e−30)`
    pub fn difference_residual(&self) -> f64 {
        let Some(first) = self.first() else { return 0.0 };
        let scale = first.e1sq.max(1e-30);
        self.records
            .iter()
            .map(|r| (r.diff() - first.diff()).abs())
            .fold(0.0, f64::max)
            / scale
    }

    /// `max_t |(E1²+E2²)(t) − (E1²+E2²)(0) + 2∫₀ᵗD| / (E1²+E2²)(0)`
    pub fn balance_residual(&self) -> f64 {
        let Some(first) = self.first() else { return 0.0 };
        let scale = first.sum().max(1e-30);
        self.records
            .iter()
            .map(|r| (r.sum() - first.sum() + 2.0 * r.cum_dissipation).abs())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,E1sq,E2sq,diff,sum,dissipation,cum_dissipation")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.t,
                r.e1sq,
                r.e2sq,
                r.diff(),
                r.sum(),
                r.dissipation,
                r.cum_dissipation
            )?;
        }
        Ok(())
    }
}
