use std::io::Write;

use serde::Serialize;

use super::trace::{m_correction, ProfileTrace};
use super::ProfileError;
use crate::radiation::{RadiationError, RadiationTable};

/// Estimators of `m(σ, ω)` on one ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MEstimate {
    pub sigma: f64,
    pub theta: f64,
    pub eps: f64,
    /// `V₁² − V₂²` at the evaluation time.
    pub m_direct: f64,
    /// `V₁(t₀)² − V₂(t₀)² + 2∫_{t₀}^{T} ρ`.
    pub m_corrected: f64,
    /// `ε²((∂σF₁)² − (∂σF₂)²)`
    pub m_leading: f64,
    pub residual: f64,
}

/// `ε²((∂σF₁)² − (∂σF₂)²)` from the per-unit-amplitude table.
pub fn m_leading(table: &RadiationTable, eps: f64, sigma: f64, theta: f64) -> Result<f64, RadiationError> {
    let s = table.interpolate(sigma, theta)?;
    Ok(eps * eps * (s.df[0] * s.df[0] - s.df[1] * s.df[1]))
}

impl MEstimate {
    /// Builds the estimate from a trace with remainders, evaluating `m_direct`
    /// at `t_eval` and truncating the ρ-integral at the last sample.
    pub fn from_trace(trace: &ProfileTrace, table: &RadiationTable, t_eval: f64) -> Result<Self, ProfileError> {
        let m_direct = trace.m_direct(t_eval)?;
        let t_end = *trace.times.last().ok_or_else(|| ProfileError::Coverage {
            from: trace.t0,
            to: t_eval,
            reason: "empty trace".into(),
        })?;
        let m_corrected = m_correction(trace, t_end)?;
        let m_lead = m_leading(table, trace.eps, trace.sigma, trace.theta)?;
        let est = MEstimate {
            sigma: trace.sigma,
            theta: trace.theta,
            eps: trace.eps,
            m_direct,
            m_corrected,
            m_leading: m_lead,
            residual: m_direct - m_lead,
        };
        if [est.m_direct, est.m_corrected, est.m_leading].iter().any(|v| !v.is_finite()) {
            return Err(ProfileError::InvalidInput(format!(
                "non-finite estimate at sigma={}, theta={}",
                est.sigma, est.theta
            )));
        }
        Ok(est)
    }
}

/// Columns `sigma, theta, eps, m_direct, m_corrected, m_leading, residual`.
pub fn write_estimates_csv(estimates: &[MEstimate], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "sigma,theta,eps,m_direct,m_corrected,m_leading,residual")?;
    for e in estimates {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.sigma, e.theta, e.eps, e.m_direct, e.m_corrected, e.m_leading, e.residual
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BumpSpec, BumpSum, ComponentData, InitialData};
    use crate::radiation::{default_sigma_grid, friedlander_table};

    fn table(symmetric: bool) -> RadiationTable {
        let c1 = ComponentData {
            f: BumpSum::single(BumpSpec::new([0.0, 0.0], 1.0, 1.0).unwrap()),
            g: BumpSum::single(BumpSpec::new([0.0, 0.0], 0.6, 0.8).unwrap()),
        };
        let c2 = if symmetric {
            c1.clone()
        } else {
            ComponentData {
                f: BumpSum::default(),
                g: BumpSum::single(BumpSpec::new([0.0, 0.0], 1.0, -1.0).unwrap()),
            }
        };
        let d = InitialData::new([c1, c2], 1.0).unwrap();
        friedlander_table(&d, &default_sigma_grid(1.0), &[0.0]).unwrap()
    }

    #[test]
    fn zero_beyond_support() {
        let t = table(false);
        assert_eq!(m_leading(&t, 0.3, 1.2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn identical_components_vanish() {
        let t = table(true);
        for &s in &[-3.0, -1.0, -0.2, 0.5] {
            assert_eq!(m_leading(&t, 0.4, s, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn quadratic_in_eps() {
        let t = table(false);
        for &s in &[-2.0, -1.0, 0.0, 0.5] {
            let a = m_leading(&t, 0.15, s, 0.0).unwrap();
            let b = m_leading(&t, 0.3, s, 0.0).unwrap();
            assert_eq!(b, 4.0 * a);
        }
    }

    #[test]
    fn below_table_is_an_error() {
        let t = table(false);
        assert!(matches!(
            m_leading(&t, 0.3, -1e3, 0.0),
            Err(RadiationError::Extrapolation { .. })
        ));
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_estimates_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "sigma,theta,eps,m_direct,m_corrected,m_leading,residual\n");
    }
}
