use rayon::prelude::*;

use super::grid::Geometry;
use super::{RunSetup, SolverError};
use crate::model::{InitialData, SolverMode};
use crate::quadrature::pairwise_sum;

/// Number of corrector passes for the centered `∂ₜu` inside the nonlinearity.
pub const CORRECTOR_PASSES: usize = 2;

/// Two-component field on a grid.
///
/// The state at `t_n` stores `u^{n−1}`, `u^n` and the look-ahead level `u^{n+1}`,
/// so that `∂ₜu^n = (u^{n+1} − u^{n−1}) / 2Δt` is available at the current level.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub(crate) geometry: Geometry,
    pub(crate) nonlinear: bool,
    pub(crate) t: f64,
    pub(crate) dt: f64,
    pub(crate) step: usize,
    pub(crate) prev: [Vec<f64>; 2],
    pub(crate) cur: [Vec<f64>; 2],
    pub(crate) next: [Vec<f64>; 2],
    pub(crate) vel: [Vec<f64>; 2],
    /// `∫(∂ₜu₁)²(∂ₜu₂)² dx` at the current level.
    pub(crate) dissipation: f64,
    radial_plus: Vec<f64>,
    radial_minus: Vec<f64>,
}

impl FieldState {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn mode(&self) -> SolverMode {
        self.geometry.mode
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    /// `u_j` at the current level; `component` is 0 or 1.
    pub fn field(&self, component: usize) -> &[f64] {
        &self.cur[component]
    }

    /// `∂ₜu_j` at the current level.
    pub fn velocity(&self, component: usize) -> &[f64] {
        &self.vel[component]
    }

    pub fn previous(&self, component: usize) -> &[f64] {
        &self.prev[component]
    }

    pub fn dissipation(&self) -> f64 {
        self.dissipation
    }

    /// Builds a state from explicit level data `u^{-1}` and `u^0` (e.g. an exact
    /// solution sampled at two times) and computes the look-ahead level.
    pub fn from_levels(
        geometry: Geometry,
        dt: f64,
        t0: f64,
        nonlinear: bool,
        before: [Vec<f64>; 2],
        at: [Vec<f64>; 2],
    ) -> Result<Self, SolverError> {
        let len = geometry.len();
        if before.iter().chain(&at).any(|v| v.len() != len) {
            return Err(SolverError::Config(format!("level arrays must have {len} entries")));
        }
        let (radial_plus, radial_minus) = radial_coefficients(&geometry);
        let mut state = FieldState {
            geometry,
            nonlinear,
            t: t0 - dt,
            dt,
            step: 0,
            prev: [vec![0.0; len], vec![0.0; len]],
            cur: before,
            next: at,
            vel: [vec![0.0; len], vec![0.0; len]],
            dissipation: 0.0,
            radial_plus,
            radial_minus,
        };
        state.advance()?;
        state.step = 0;
        state.t = t0;
        Ok(state)
    }

    /// Loads given `u` and `∂ₜu` at time `t` as the current level; the
    /// neighbouring levels are the first-order shifts `u ± Δt ∂ₜu`.
    pub fn from_snapshot(
        geometry: Geometry,
        dt: f64,
        t: f64,
        nonlinear: bool,
        u: [Vec<f64>; 2],
        ut: [Vec<f64>; 2],
    ) -> Result<Self, SolverError> {
        let len = geometry.len();
        if u.iter().chain(&ut).any(|v| v.len() != len) {
            return Err(SolverError::Config(format!("snapshot arrays must have {len} entries")));
        }
        let shift = |sign: f64| -> [Vec<f64>; 2] {
            [0, 1].map(|j| u[j].iter().zip(&ut[j]).map(|(a, b)| a + sign * dt * b).collect())
        };
        let terms: Vec<f64> = (0..len)
            .map(|k| ut[0][k] * ut[0][k] * ut[1][k] * ut[1][k] * geometry.cell_measure(k))
            .collect();
        let (radial_plus, radial_minus) = radial_coefficients(&geometry);
        Ok(FieldState {
            geometry,
            nonlinear,
            t,
            dt,
            step: 0,
            prev: shift(-1.0),
            next: shift(1.0),
            cur: u,
            vel: ut,
            dissipation: pairwise_sum(&terms),
            radial_plus,
            radial_minus,
        })
    }

    /// Advances one step: `u^{n+2} = 2u^{n+1} − u^n + Δt²(Δ_h u^{n+1} + N^{n+1})`.
    pub fn step(&mut self) -> Result<(), SolverError> {
        self.advance()
    }

    fn advance(&mut self) -> Result<(), SolverError> {
        let bad = match self.geometry.mode {
            SolverMode::Cartesian2d => self.kernel_cartesian(),
            SolverMode::Radial => self.kernel_radial(),
        };
        if let Some(idx) = bad {
            return Err(SolverError::Unstable {
                last_stable_time: self.t,
                position: self.geometry.position(idx),
            });
        }
        // new level was written into `prev`
        for j in 0..2 {
            std::mem::swap(&mut self.prev[j], &mut self.cur[j]);
            std::mem::swap(&mut self.cur[j], &mut self.next[j]);
        }
        // now prev = u^n, cur = u^{n+1}, next = old prev slot holding u^{n+2}
        self.t += self.dt;
        self.step += 1;
        Ok(())
    }

    /// Writes `u^{n+2}` into `prev` and `∂ₜu^{n+1}` into `vel`, with
    /// `a = next = u^{n+1}` and `b = cur = u^n`. Returns the first non-finite index.
    fn kernel_cartesian(&mut self) -> Option<usize> {
        let n = self.geometry.n;
        let dt = self.dt;
        let dt2 = dt * dt;
        let inv_h2 = 1.0 / (self.geometry.h * self.geometry.h);
        let measure = self.geometry.h * self.geometry.h;
        let nonlinear = self.nonlinear;
        let [a1, a2] = &self.next;
        let [b1, b2] = &self.cur;
        let [c1, c2] = &mut self.prev;
        let [v1, v2] = &mut self.vel;
        let rows: Vec<(f64, Option<usize>)> = c1
            .par_chunks_mut(n)
            .zip(c2.par_chunks_mut(n))
            .zip(v1.par_chunks_mut(n).zip(v2.par_chunks_mut(n)))
            .enumerate()
            .map(|(row, ((c1r, c2r), (v1r, v2r)))| {
                if row == 0 || row == n - 1 {
                    c1r.fill(0.0);
                    c2r.fill(0.0);
                    v1r.fill(0.0);
                    v2r.fill(0.0);
                    return (0.0, None);
                }
                let base_idx = row * n;
                let mut diss = 0.0;
                let mut bad = None;
                c1r[0] = 0.0;
                c2r[0] = 0.0;
                v1r[0] = 0.0;
                v2r[0] = 0.0;
                c1r[n - 1] = 0.0;
                c2r[n - 1] = 0.0;
                v1r[n - 1] = 0.0;
                v2r[n - 1] = 0.0;
                for i in 1..n - 1 {
                    let k = base_idx + i;
                    let lap1 = (a1[k + 1] + a1[k - 1] + a1[k + n] + a1[k - n] - 4.0 * a1[k]) * inv_h2;
                    let lap2 = (a2[k + 1] + a2[k - 1] + a2[k + n] + a2[k - n] - 4.0 * a2[k]) * inv_h2;
                    let (u1, u2, w1, w2) = update_point(a1[k], a2[k], b1[k], b2[k], lap1, lap2, dt, dt2, nonlinear);
                    if !(u1.is_finite() && u2.is_finite()) && bad.is_none() {
                        bad = Some(k);
                    }
                    c1r[i] = u1;
                    c2r[i] = u2;
                    v1r[i] = w1;
                    v2r[i] = w2;
                    diss += w1 * w1 * w2 * w2;
                }
                (diss * measure, bad)
            })
            .collect();
        let sums: Vec<f64> = rows.iter().map(|r| r.0).collect();
        self.dissipation = pairwise_sum(&sums);
        rows.iter().find_map(|r| r.1)
    }

    fn kernel_radial(&mut self) -> Option<usize> {
        let n = self.geometry.n;
        let dt = self.dt;
        let dt2 = dt * dt;
        let h = self.geometry.h;
        let inv_h2 = 1.0 / (h * h);
        let nonlinear = self.nonlinear;
        let [a1, a2] = &self.next;
        let [b1, b2] = &self.cur;
        let [c1, c2] = &mut self.prev;
        let [v1, v2] = &mut self.vel;
        let cp = &self.radial_plus;
        let cm = &self.radial_minus;
        let mut bad = None;
        const CHUNK: usize = 256;
        let mut partial = Vec::with_capacity(n / CHUNK + 1);
        let mut acc = 0.0;
        for i in 0..n {
            let right1 = if i + 1 < n { a1[i + 1] } else { 0.0 };
            let right2 = if i + 1 < n { a2[i + 1] } else { 0.0 };
            let left1 = if i > 0 { a1[i - 1] } else { a1[0] };
            let left2 = if i > 0 { a2[i - 1] } else { a2[0] };
            let lap1 = (cp[i] * (right1 - a1[i]) - cm[i] * (a1[i] - left1)) * inv_h2;
            let lap2 = (cp[i] * (right2 - a2[i]) - cm[i] * (a2[i] - left2)) * inv_h2;
            let (u1, u2, w1, w2) = update_point(a1[i], a2[i], b1[i], b2[i], lap1, lap2, dt, dt2, nonlinear);
            if !(u1.is_finite() && u2.is_finite()) && bad.is_none() {
                bad = Some(i);
            }
            c1[i] = u1;
            c2[i] = u2;
            v1[i] = w1;
            v2[i] = w2;
            acc += w1 * w1 * w2 * w2 * (i as f64 + 0.5);
            if (i + 1) % CHUNK == 0 {
                partial.push(acc);
                acc = 0.0;
            }
        }
        partial.push(acc);
        self.dissipation = pairwise_sum(&partial) * 2.0 * std::f64::consts::PI * h * h;
        bad
    }
}

/// Pointwise leapfrog update with predictor–corrector timing of `∂ₜu` in the
/// cubic term. Returns `(u₁^{n+1}, u₂^{n+1}, ∂ₜu₁^n, ∂ₜu₂^n)` where the inputs are
/// `a = u^n`, `b = u^{n−1}`.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn update_point(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    lap1: f64,
    lap2: f64,
    dt: f64,
    dt2: f64,
    nonlinear: bool,
) -> (f64, f64, f64, f64) {
    let base1 = 2.0 * a1 - b1 + dt2 * lap1;
    let base2 = 2.0 * a2 - b2 + dt2 * lap2;
    let inv_2dt = 0.5 / dt;
    if !nonlinear {
        return (base1, base2, (base1 - b1) * inv_2dt, (base2 - b2) * inv_2dt);
    }
    // predictor: lagged difference
    let mut w1 = (a1 - b1) / dt;
    let mut w2 = (a2 - b2) / dt;
    let mut u1 = base1 - dt2 * w2 * w2 * w1;
    let mut u2 = base2 - dt2 * w1 * w1 * w2;
    for _ in 0..CORRECTOR_PASSES {
        w1 = (u1 - b1) * inv_2dt;
        w2 = (u2 - b2) * inv_2dt;
        u1 = base1 - dt2 * w2 * w2 * w1;
        u2 = base2 - dt2 * w1 * w1 * w2;
    }
    (u1, u2, (u1 - b1) * inv_2dt, (u2 - b2) * inv_2dt)
}

/// `(r_{i+½}/r_i, r_{i−½}/r_i)` for the flux-form radial Laplacian; the axis
/// flux vanishes, which is the even reflection `u_{−1} = u_0`.
fn radial_coefficients(geometry: &Geometry) -> (Vec<f64>, Vec<f64>) {
    if geometry.mode != SolverMode::Radial {
        return (Vec::new(), Vec::new());
    }
    let plus = (0..geometry.n).map(|i| (i as f64 + 1.0) / (i as f64 + 0.5)).collect();
    let minus = (0..geometry.n).map(|i| i as f64 / (i as f64 + 0.5)).collect();
    (plus, minus)
}

/// Discrete Laplacian of one level, boundary entries zero.
pub(crate) fn laplacian(geometry: &Geometry, u: &[f64]) -> Vec<f64> {
    let h = geometry.h;
    let inv_h2 = 1.0 / (h * h);
    let n = geometry.n;
    let mut out = vec![0.0; u.len()];
    match geometry.mode {
        SolverMode::Cartesian2d => {
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    let k = j * n + i;
                    out[k] = (u[k + 1] + u[k - 1] + u[k + n] + u[k - n] - 4.0 * u[k]) * inv_h2;
                }
            }
        }
        SolverMode::Radial => {
            let (cp, cm) = radial_coefficients(geometry);
            for i in 0..n {
                let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                let left = if i > 0 { u[i - 1] } else { u[0] };
                out[i] = (cp[i] * (right - u[i]) - cm[i] * (u[i] - left)) * inv_h2;
            }
        }
    }
    out
}

/// Time step actually used: the largest `Δt ≤ CFL·h` dividing `T` evenly.
pub fn time_step(setup: &RunSetup) -> (f64, usize) {
    let target = setup.cfl * setup.h;
    if setup.final_time <= 0.0 {
        return (target, 0);
    }
    let steps = (setup.final_time / target - 1e-9).ceil().max(1.0) as usize;
    (setup.final_time / steps as f64, steps)
}

/// Sets up level 0 from `εf_j` and level −1 from the second-order Taylor start
/// `u^{−1} = u^0 − Δt εg + ½Δt²(Δ_h u^0 + N^0)`.
pub fn init_state(setup: &RunSetup, data: &InitialData, nonlinear: bool) -> Result<FieldState, SolverError> {
    setup.validate()?;
    data.validate().map_err(|e| SolverError::Config(e.to_string()))?;
    if setup.mode == SolverMode::Radial && !data.is_radial() {
        return Err(SolverError::Config("radial mode requires data centered at the origin".into()));
    }
    let r0 = data.support_radius();
    let required = r0 + setup.final_time + 2.0 * setup.h;
    let extent = match setup.extent {
        Some(e) if e < required => {
            return Err(SolverError::DomainTooSmall { extent: e, required });
        }
        Some(e) => e,
        None => required,
    };
    let geometry = Geometry::covering(setup.mode, setup.h, extent);
    let (dt, _) = time_step(setup);
    let eps = data.epsilon;

    let u0: [Vec<f64>; 2] = [0, 1].map(|j| geometry.sample(|x| eps * data.components[j].f.value(x)));
    let g: [Vec<f64>; 2] = [0, 1].map(|j| geometry.sample(|x| eps * data.components[j].g.value(x)));
    let lap: [Vec<f64>; 2] = [0, 1].map(|j| laplacian(&geometry, &u0[j]));
    let before: [Vec<f64>; 2] = [0, 1].map(|j| {
        let other = 1 - j;
        (0..geometry.len())
            .map(|k| {
                let n0 = if nonlinear { -g[other][k] * g[other][k] * g[j][k] } else { 0.0 };
                u0[j][k] - dt * g[j][k] + 0.5 * dt * dt * (lap[j][k] + n0)
            })
            .collect()
    });
    FieldState::from_levels(geometry, dt, 0.0, nonlinear, before, u0)
}
