use super::ProfileError;
use crate::model::{Point, SolverMode};
use crate::solver::{local_fields, FieldState, LocalFields, SolverError};

fn fields_at(state: &FieldState, x: Point) -> Result<(LocalFields, f64), ProfileError> {
    let r = x[0].hypot(x[1]);
    // relative slack so that σ = −t + h itself is admitted
    if !(r >= state.geometry().h * (1.0 - 1e-9)) {
        return Err(ProfileError::OutOfDomain { point: x });
    }
    match local_fields(state, x) {
        Ok(lf) => Ok((lf, r)),
        Err(SolverError::OutOfDomain { point }) => Err(ProfileError::OutOfDomain { point }),
        Err(e) => Err(e.into()),
    }
}

fn u_from(lf: &LocalFields, x: Point, r: f64) -> [f64; 2] {
    let sr = r.sqrt();
    [0, 1].map(|j| {
        let ur = (lf.grad[j][0] * x[0] + lf.grad[j][1] * x[1]) / r;
        0.5 * (sr * ur + 0.5 * lf.u[j] / sr - sr * lf.ut[j])
    })
}

/// `U_j = ½(∂_r − ∂_t)(r^{1/2}u_j) = ½(r^{1/2}∂_r u_j + ½r^{−1/2}u_j − r^{1/2}∂_t u_j)`.
pub fn compute_u(state: &FieldState, x: Point) -> Result<[f64; 2], ProfileError> {
    let (lf, r) = fields_at(state, x)?;
    Ok(u_from(&lf, x, r))
}

/// `V_j(t; σ, ω) = U_j(t, (t + σ)ω)` at the state's time.
pub fn sample_v(state: &FieldState, sigma: f64, omega: [f64; 2]) -> Result<[f64; 2], ProfileError> {
    let rho = state.time() + sigma;
    compute_u(state, [rho * omega[0], rho * omega[1]])
}

/// `H_j = ½(r^{1/2}(∂ₜu_k)²∂ₜu_j + U_k²U_j/t) − (4Ω²u_j + u_j)/(8r^{3/2})`, `k = 3 − j`.
///
/// `component` is 0 or 1. Radial states have `Ω u ≡ 0`, so the angular term
/// is dropped there.
pub fn compute_h(state: &FieldState, x: Point, component: usize) -> Result<f64, ProfileError> {
    let t = state.time();
    if t < 2.0 {
        return Err(ProfileError::TooEarly { t });
    }
    if component > 1 {
        return Err(ProfileError::InvalidInput(format!("component index {component} out of range")));
    }
    let (lf, r) = fields_at(state, x)?;
    let uu = u_from(&lf, x, r);
    let (j, k) = (component, 1 - component);
    let omega2 = match state.mode() {
        SolverMode::Radial => 0.0,
        SolverMode::Cartesian2d => lf.angular2(x, j),
    };
    let cubic = 0.5 * (r.sqrt() * lf.ut[k] * lf.ut[k] * lf.ut[j] + uu[k] * uu[k] * uu[j] / t);
    Ok(cubic - (4.0 * omega2 + lf.u[j]) / (8.0 * r.powf(1.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Geometry;

    fn profile(s: f64) -> f64 {
        (-4.0 * s * s).exp() * (1.0 + 0.5 * s)
    }

    fn dprofile(s: f64) -> f64 {
        (-4.0 * s * s).exp() * (0.5 - 8.0 * s * (1.0 + 0.5 * s))
    }

    /// `u = r^{−1/2}k(r ∓ t)` and its time derivative at time `t`.
    fn wave_state(mode: SolverMode, h: f64, t: f64, outgoing: bool) -> FieldState {
        let g = Geometry::covering(mode, h, t + 2.0);
        let sign = if outgoing { -1.0 } else { 1.0 };
        let u = g.sample(|x| {
            let r = x[0].hypot(x[1]);
            profile(r + sign * t) / r.sqrt()
        });
        let ut = g.sample(|x| {
            let r = x[0].hypot(x[1]);
            sign * dprofile(r + sign * t) / r.sqrt()
        });
        FieldState::from_snapshot(g, 0.45 * h, t, false, [u.clone(), u], [ut.clone(), ut]).unwrap()
    }

    #[test]
    fn zero_state_gives_zero() {
        let g = Geometry::covering(SolverMode::Cartesian2d, 0.1, 3.0);
        let z = vec![0.0; g.len()];
        let s = FieldState::from_snapshot(g, 0.04, 2.5, true, [z.clone(), z.clone()], [z.clone(), z]).unwrap();
        assert_eq!(compute_u(&s, [1.0, 0.3]).unwrap(), [0.0, 0.0]);
        assert_eq!(compute_h(&s, [1.0, 0.3], 0).unwrap(), 0.0);
        assert_eq!(compute_h(&s, [1.0, 0.3], 1).unwrap(), 0.0);
    }

    #[test]
    fn outgoing_wave_recovers_derivative() {
        let t = 4.0;
        let x_of = |r: f64| [r * 0.6, r * 0.8];
        for mode in [SolverMode::Radial, SolverMode::Cartesian2d] {
            let errs: Vec<f64> = [0.04, 0.02]
                .iter()
                .map(|&h| {
                    let s = wave_state(mode, h, t, true);
                    [4.0, 4.13, 4.3]
                        .iter()
                        .map(|&r| (compute_u(&s, x_of(r)).unwrap()[0] - dprofile(r - t)).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(errs[1] < 2e-3, "{mode:?} {errs:?}");
            assert!((errs[0] / errs[1]).log2() > 1.8, "{mode:?} {errs:?}");
        }
    }

    #[test]
    fn incoming_wave_is_annihilated() {
        let t = 3.0;
        let s = wave_state(SolverMode::Radial, 0.01, t, false);
        for &r in &[0.5, 1.0, 2.0] {
            let u = compute_u(&s, [r, 0.0]).unwrap()[1];
            assert!(u.abs() <= 1e-3 / r, "r={r}: {u}");
        }
    }

    #[test]
    fn foot_point_near_origin() {
        let s = wave_state(SolverMode::Radial, 0.05, 3.0, true);
        let sigma = -3.0 + 0.05;
        let v = sample_v(&s, sigma, [1.0, 0.0]).unwrap();
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(matches!(
            sample_v(&s, -3.0 + 0.01, [1.0, 0.0]),
            Err(ProfileError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn radial_remainder_formula() {
        let t = 4.0;
        let s = wave_state(SolverMode::Radial, 0.02, t, true);
        let x: [f64; 2] = [4.2, 0.0];
        let lf = local_fields(&s, x).unwrap();
        let uu = compute_u(&s, x).unwrap();
        let r: f64 = 4.2;
        let want = 0.5 * (r.sqrt() * lf.ut[1].powi(2) * lf.ut[0] + uu[1].powi(2) * uu[0] / t) - lf.u[0] / (8.0 * r.powf(1.5));
        let got = compute_h(&s, x, 0).unwrap();
        assert!((got - want).abs() <= 1e-14 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn angular_term_on_cos_theta_field() {
        // u = χ(r)cos θ has Ω²u = −u, so the angular term equals 3u/(8r^{3/2})
        let chi = |r: f64| (-(r - 1.5).powi(2) * 3.0).exp();
        let x: [f64; 2] = [0.9, 1.1];
        let r = x[0].hypot(x[1]);
        let want = 3.0 * chi(r) * (x[0] / r) / (8.0 * r.powf(1.5));
        let errs: Vec<f64> = [0.05, 0.025]
            .iter()
            .map(|&h| {
                let g = Geometry::covering(SolverMode::Cartesian2d, h, 4.0);
                let u = g.sample(|p| {
                    let r = p[0].hypot(p[1]);
                    chi(r) * p[0] / r.max(1e-300)
                });
                let z = vec![0.0; g.len()];
                let s = FieldState::from_snapshot(g, 0.4 * h, 2.0, false, [u, z.clone()], [z.clone(), z]).unwrap();
                (compute_h(&s, x, 0).unwrap() - want).abs()
            })
            .collect();
        assert!(errs[1] < 2e-2 * want.abs(), "{errs:?}");
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }

    #[test]
    fn remainder_needs_late_time() {
        let s = wave_state(SolverMode::Radial, 0.05, 1.5, true);
        assert!(matches!(compute_h(&s, [1.0, 0.0], 0), Err(ProfileError::TooEarly { .. })));
    }
}
