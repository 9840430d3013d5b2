use ode_solvers::{Dopri5, OutputType, System, Vector2};
use serde::Serialize;

use super::ProfileError;

/// Relative tolerance of the adaptive profile integrator.
pub const PROFILE_RTOL: f64 = 1e-10;

const MAX_STEPS: u32 = 1_000_000;

/// Accepted steps of a truncated-profile integration.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ProfilePath {
    pub times: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

impl ProfilePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, f64, f64)> {
        let i = self.times.len().checked_sub(1)?;
        Some((self.times[i], self.v1[i], self.v2[i]))
    }
}

/// `m = V₁² − V₂²`, conserved by the truncated system.
pub fn profile_invariant(v1: f64, v2: f64) -> f64 {
    v1 * v1 - v2 * v2
}

/// In `s = ln t` the system reads `V₁' = −V₁V₂²/2`, `V₂' = −V₁²V₂/2`.
struct Truncated;

impl System<f64, Vector2<f64>> for Truncated {
    fn system(&self, _s: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        dy[0] = -0.5 * y[0] * y[1] * y[1];
        dy[1] = -0.5 * y[0] * y[0] * y[1];
    }
}

/// Integrates `∂ₜV₁ = −V₁V₂²/(2t)`, `∂ₜV₂ = −V₁²V₂/(2t)` from `t_start` to
/// `t_end` with Dormand–Prince 5(4) in `ln t`, relative tolerance [`PROFILE_RTOL`].
pub fn truncated_profile_solve(v10: f64, v20: f64, t_start: f64, t_end: f64) -> Result<ProfilePath, ProfileError> {
    if !(t_start > 0.0 && t_end > t_start && t_end.is_finite()) {
        return Err(ProfileError::InvalidInput(format!(
            "need 0 < t_start < t_end, got [{t_start}, {t_end}]"
        )));
    }
    if !(v10.is_finite() && v20.is_finite()) {
        return Err(ProfileError::InvalidInput("non-finite initial profile".into()));
    }
    if v10 == 0.0 || v20 == 0.0 {
        // both right-hand sides vanish on the axes
        return Ok(ProfilePath {
            times: vec![t_start, t_end],
            v1: vec![v10; 2],
            v2: vec![v20; 2],
        });
    }
    let (s0, s1) = (t_start.ln(), t_end.ln());
    let mut solver = Dopri5::from_param(
        Truncated,
        s0,
        s1,
        0.0,
        Vector2::new(v10, v20),
        PROFILE_RTOL,
        0.0,
        0.9,
        0.04,
        0.2,
        10.0,
        s1 - s0,
        0.0,
        MAX_STEPS,
        1000,
        OutputType::Sparse,
    );
    solver
        .integrate()
        .map_err(|e| ProfileError::Integration(e.to_string()))?;
    let mut path = ProfilePath::default();
    for (s, y) in solver.x_out().iter().zip(solver.y_out()) {
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(ProfileError::Integration(format!("non-finite profile at t={}", s.exp())));
        }
        path.times.push(s.exp());
        path.v1.push(y[0]);
        path.v2.push(y[1]);
    }
    if let Some(last) = path.times.last_mut() {
        *last = t_end;
    }
    Ok(path)
}

/// `(1 − e^{−aL})/a`, continuous at `a = 0`.
fn phi(a: f64, l: f64) -> f64 {
    if a == 0.0 {
        l
    } else {
        -(-a * l).exp_m1() / a
    }
}

/// Separation-of-variables solution: `P = V₂²` obeys `dP/d(ln t) = −P(P + m)`, so
/// `P/(P + m) = A t^{−m}`. Written as `P = P₀e^{−mL}/(1 + P₀(1 − e^{−mL})/m)`,
/// `L = ln(t/t_start)`, which stays regular at `m = 0`; `V₁²` follows from the
/// mirrored formula. Signs are preserved.
pub fn truncated_profile_closed_form(v10: f64, v20: f64, t_start: f64, t: f64) -> (f64, f64) {
    let l = (t / t_start).ln();
    let m = profile_invariant(v10, v20);
    let p0 = v20 * v20;
    let q0 = v10 * v10;
    let p = p0 * (-m * l).exp() / (1.0 + p0 * phi(m, l));
    let q = q0 * (m * l).exp() / (1.0 + q0 * phi(-m, l));
    (v10.signum() * q.sqrt(), v20.signum() * p.sqrt())
}
