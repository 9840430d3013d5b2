use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::fields::{compute_h, sample_v};
use super::ProfileError;
use crate::quadrature::trapezoid;
use crate::solver::{FieldState, Sampler, SolverError};

/// `t₀,σ = max{2, −2σ}`
pub fn t0_sigma(sigma: f64) -> f64 {
    f64::max(2.0, -2.0 * sigma)
}

/// `t₁,σ = max{ε⁻¹, −2σ}`
pub fn t1_sigma(sigma: f64, eps: f64) -> f64 {
    f64::max(1.0 / eps, -2.0 * sigma)
}

/// Null ray `x = (t + σ)ω`, `ω = (cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub sigma: f64,
    pub theta: f64,
}

impl Ray {
    pub fn new(sigma: f64, theta: f64) -> Self {
        Ray { sigma, theta }
    }

    pub fn omega(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }
}

/// Profile samples along one ray. The remainder columns are empty unless the
/// trace was recorded with remainders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileTrace {
    pub sigma: f64,
    pub theta: f64,
    pub eps: f64,
    pub t0: f64,
    pub t1: f64,
    /// Solver time step, which bounds the admissible sample spacing.
    pub dt: f64,
    pub times: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    pub rho: Vec<f64>,
}

impl ProfileTrace {
    pub fn new(ray: Ray, eps: f64, dt: f64) -> Self {
        ProfileTrace {
            sigma: ray.sigma,
            theta: ray.theta,
            eps,
            t0: t0_sigma(ray.sigma),
            t1: t1_sigma(ray.sigma, eps),
            dt,
            times: Vec::new(),
            v1: Vec::new(),
            v2: Vec::new(),
            k1: Vec::new(),
            k2: Vec::new(),
            rho: Vec::new(),
        }
    }

    pub fn ray(&self) -> Ray {
        Ray::new(self.sigma, self.theta)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn has_remainders(&self) -> bool {
        !self.times.is_empty() && self.rho.len() == self.times.len()
    }

    /// Index of the sample nearest to `t`.
    pub fn nearest(&self, t: f64) -> Option<usize> {
        (0..self.times.len()).min_by(|&a, &b| (self.times[a] - t).abs().total_cmp(&(self.times[b] - t).abs()))
    }

    /// `V₁² − V₂²` at the sample nearest to `t`, which must lie within `4Δt`.
    pub fn m_direct(&self, t: f64) -> Result<f64, ProfileError> {
        let i = self.nearest(t).ok_or_else(|| self.coverage(t, t, "empty trace"))?;
        if (self.times[i] - t).abs() > 4.0 * self.dt * (1.0 + 1e-9) {
            return Err(self.coverage(t, t, "no sample near the evaluation time"));
        }
        Ok(self.v1[i] * self.v1[i] - self.v2[i] * self.v2[i])
    }

    fn coverage(&self, from: f64, to: f64, reason: &str) -> ProfileError {
        ProfileError::Coverage {
            from,
            to,
            reason: reason.to_string(),
        }
    }

    fn record(&mut self, state: &FieldState, remainders: bool) -> Result<(), ProfileError> {
        let t = state.time();
        if t + self.sigma < state.geometry().h || (remainders && t < 2.0) {
            return Ok(());
        }
        let omega = self.ray().omega();
        let v = sample_v(state, self.sigma, omega)?;
        self.times.push(t);
        self.v1.push(v[0]);
        self.v2.push(v[1]);
        if remainders {
            let rr = t + self.sigma;
            let x = [rr * omega[0], rr * omega[1]];
            let k1 = compute_h(state, x, 0)?;
            let k2 = compute_h(state, x, 1)?;
            self.k1.push(k1);
            self.k2.push(k2);
            self.rho.push(v[0] * k1 - v[1] * k2);
        }
        Ok(())
    }

    /// Columns `t, V1, V2, K1, K2, rho`; remainder fields are empty when absent.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,V1,V2,K1,K2,rho")?;
        let full = self.has_remainders();
        for i in 0..self.times.len() {
            if full {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    self.times[i], self.v1[i], self.v2[i], self.k1[i], self.k2[i], self.rho[i]
                )?;
            } else {
                writeln!(out, "{},{},{},,,", self.times[i], self.v1[i], self.v2[i])?;
            }
        }
        Ok(())
    }
}

/// `start, start + spacing, …` up to and including `end`.
pub fn uniform_times(start: f64, end: f64, spacing: f64) -> Vec<f64> {
    if !(spacing > 0.0) || end < start {
        return Vec::new();
    }
    let n = ((end - start) / spacing + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| start + spacing * k as f64).collect();
    if end - out[n] > 1e-9 * spacing {
        out.push(end);
    }
    out
}

/// Records traces for several rays; rays are processed in parallel at each time.
#[derive(Debug, Clone)]
pub struct ProfileSampler {
    times: Vec<f64>,
    remainders: bool,
    traces: Vec<ProfileTrace>,
}

impl ProfileSampler {
    pub fn new(rays: &[Ray], eps: f64, dt: f64, times: Vec<f64>, remainders: bool) -> Self {
        ProfileSampler {
            times,
            remainders,
            traces: rays.iter().map(|&r| ProfileTrace::new(r, eps, dt)).collect(),
        }
    }

    pub fn traces(&self) -> &[ProfileTrace] {
        &self.traces
    }

    pub fn into_traces(self) -> Vec<ProfileTrace> {
        self.traces
    }
}

impl Sampler for ProfileSampler {
    fn sample_times(&self) -> Vec<f64> {
        self.times.clone()
    }

    fn sample(&mut self, state: &FieldState) -> Result<(), SolverError> {
        let remainders = self.remainders;
        self.traces
            .par_iter_mut()
            .try_for_each(|tr| tr.record(state, remainders))
            .map_err(|e| SolverError::Sampler(e.to_string()))
    }
}

/// `V₁(t₀)² − V₂(t₀)² + 2∫_{t₀}^{T_cut} ρ dτ` (trapezoidal), `t₀ = t₀,σ`.
pub fn m_correction(trace: &ProfileTrace, t_cut: f64) -> Result<f64, ProfileError> {
    let t0 = trace.t0;
    if !trace.has_remainders() {
        return Err(trace.coverage(t0, t_cut, "trace has no remainder samples"));
    }
    let gap = 4.0 * trace.dt * (1.0 + 1e-9);
    let start = trace
        .nearest(t0)
        .filter(|&i| (trace.times[i] - t0).abs() <= gap)
        .ok_or_else(|| trace.coverage(t0, t_cut, "no sample near t0"))?;
    let end = trace
        .nearest(t_cut)
        .filter(|&i| (trace.times[i] - t_cut).abs() <= gap && i >= start)
        .ok_or_else(|| trace.coverage(t0, t_cut, "no sample near the cut time"))?;
    if trace.times[start..=end].windows(2).any(|w| w[1] - w[0] > gap) {
        return Err(trace.coverage(t0, t_cut, "sample spacing exceeds 4 dt"));
    }
    let integral = trapezoid(&trace.times[start..=end], &trace.rho[start..=end]);
    Ok(trace.v1[start].powi(2) - trace.v2[start].powi(2) + 2.0 * integral)
}

/// Size estimate `2|ρ(T)|T` of the omitted tail `2∫_T^∞ ρ`, with `T` the last sample.
pub fn m_correction_tail(trace: &ProfileTrace) -> f64 {
    match (trace.times.last(), trace.rho.last()) {
        (Some(&t), Some(&r)) => 2.0 * r.abs() * t,
        _ => 0.0,
    }
}
