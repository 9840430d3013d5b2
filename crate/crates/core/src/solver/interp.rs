use super::state::FieldState;
use super::SolverError;
use crate::model::{Point, SolverMode};

/// Fields of both components at an off-grid point and the current time level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalFields {
    pub u: [f64; 2],
    pub grad: [[f64; 2]; 2],
    pub ut: [f64; 2],
    /// `[∂₁₁, ∂₁₂, ∂₂₂]`
    pub hess: [[f64; 3]; 2],
}

impl LocalFields {
    /// `Ω²u_j` with `Ω = x₁∂₂ − x₂∂₁`.
    pub fn angular2(&self, x: Point, j: usize) -> f64 {
        let [xx, xy, yy] = self.hess[j];
        let [ux, uy] = self.grad[j];
        x[0] * x[0] * yy + x[1] * x[1] * xx - 2.0 * x[0] * x[1] * xy - x[0] * ux - x[1] * uy
    }
}

/// Cubic Lagrange weights on nodes `−1, 0, 1, 2` at offset `t ∈ [0, 1)`.
#[inline]
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Interpolates stencil derivatives to `x` by cubic Lagrange interpolation
/// (bicubic in Cartesian mode). Radial mode reflects evenly across the axis,
/// with `∂_r u` odd.
pub fn local_fields(state: &FieldState, x: Point) -> Result<LocalFields, SolverError> {
    match state.mode() {
        SolverMode::Cartesian2d => cartesian(state, x),
        SolverMode::Radial => radial(state, x),
    }
}

fn cartesian(state: &FieldState, x: Point) -> Result<LocalFields, SolverError> {
    let g = state.geometry();
    let n = g.n as isize;
    let h = g.h;
    let half = g.half() as f64;
    let xi = x[0] / h + half;
    let eta = x[1] / h + half;
    let i0 = xi.floor() as isize;
    let j0 = eta.floor() as isize;
    if !(xi.is_finite() && eta.is_finite()) || i0 < 2 || j0 < 2 || i0 + 3 > n - 1 || j0 + 3 > n - 1 {
        return Err(SolverError::OutOfDomain { point: x });
    }
    let wx = cubic_weights(xi - i0 as f64);
    let wy = cubic_weights(eta - j0 as f64);
    let n = n as usize;
    let inv_2h = 0.5 / h;
    let inv_h2 = 1.0 / (h * h);
    let inv_4h2 = 0.25 * inv_h2;
    let mut out = LocalFields::default();
    for c in 0..2 {
        let u = state.field(c);
        let v = state.velocity(c);
        let mut acc = [0.0; 7];
        for (b, wyb) in wy.iter().enumerate() {
            let row = (j0 - 1 + b as isize) as usize;
            for (a, wxa) in wx.iter().enumerate() {
                let col = (i0 - 1 + a as isize) as usize;
                let k = row * n + col;
                let w = wxa * wyb;
                let ux = (u[k + 1] - u[k - 1]) * inv_2h;
                let uy = (u[k + n] - u[k - n]) * inv_2h;
                let uxx = (u[k + 1] - 2.0 * u[k] + u[k - 1]) * inv_h2;
                let uyy = (u[k + n] - 2.0 * u[k] + u[k - n]) * inv_h2;
                let uxy = (u[k + n + 1] - u[k + n - 1] - u[k - n + 1] + u[k - n - 1]) * inv_4h2;
                for (slot, val) in acc.iter_mut().zip([u[k], ux, uy, uxx, uxy, uyy, v[k]]) {
                    *slot += w * val;
                }
            }
        }
        out.u[c] = acc[0];
        out.grad[c] = [acc[1], acc[2]];
        out.hess[c] = [acc[3], acc[4], acc[5]];
        out.ut[c] = acc[6];
    }
    Ok(out)
}

fn radial(state: &FieldState, x: Point) -> Result<LocalFields, SolverError> {
    let g = state.geometry();
    let n = g.n as isize;
    let h = g.h;
    let r = x[0].hypot(x[1]);
    let xi = r / h - 0.5;
    let i0 = xi.floor() as isize;
    if !xi.is_finite() || i0 + 2 > n - 1 {
        return Err(SolverError::OutOfDomain { point: x });
    }
    let w = cubic_weights(xi - i0 as f64);
    let inv_2h = 0.5 / h;
    let inv_h2 = 1.0 / (h * h);
    let at = |u: &[f64], m: isize| -> f64 {
        if m < 0 {
            u[(-m - 1) as usize]
        } else if m >= n {
            0.0
        } else {
            u[m as usize]
        }
    };
    let mut out = LocalFields::default();
    for c in 0..2 {
        let u = state.field(c);
        let v = state.velocity(c);
        let mut acc = [0.0; 4];
        for (a, wa) in w.iter().enumerate() {
            let m = i0 - 1 + a as isize;
            // even reflection: cell −m−1 mirrors cell m, so u_r flips sign
            let (cell, sign) = if m < 0 { (-m - 1, -1.0) } else { (m, 1.0) };
            let ur = (at(u, cell + 1) - at(u, cell - 1)) * inv_2h;
            let urr = (at(u, cell + 1) - 2.0 * at(u, cell) + at(u, cell - 1)) * inv_h2;
            acc[0] += wa * at(u, cell);
            acc[1] += wa * sign * ur;
            acc[2] += wa * urr;
            acc[3] += wa * at(v, cell);
        }
        let [val, ur, urr, ut] = acc;
        out.u[c] = val;
        out.ut[c] = ut;
        if r > 0.0 {
            let (co, si) = (x[0] / r, x[1] / r);
            let ur_r = ur / r;
            out.grad[c] = [ur * co, ur * si];
            out.hess[c] = [
                urr * co * co + ur_r * si * si,
                (urr - ur_r) * co * si,
                urr * si * si + ur_r * co * co,
            ];
        } else {
            out.hess[c] = [urr, 0.0, urr];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{FieldState, Geometry};

    fn load(geometry: Geometry, f: impl Fn(Point) -> f64, ft: impl Fn(Point) -> f64, dt: f64) -> FieldState {
        // levels at −dt and 0 built from a first-order Taylor shift; only u is checked exactly
        let at = [0, 1].map(|_| geometry.sample(&f));
        let before = [0, 1].map(|_| geometry.sample(|x| f(x) - dt * ft(x)));
        FieldState::from_levels(geometry, dt, 0.0, false, before, at).unwrap()
    }

    #[test]
    fn cubic_weights_reproduce_cubics() {
        for &t in &[0.0, 0.3, 0.75] {
            let w = cubic_weights(t);
            let p = |s: f64| 1.0 - 2.0 * s + 0.5 * s * s + 0.25 * s * s * s;
            let got: f64 = (0..4).map(|a| w[a] * p(a as f64 - 1.0)).sum();
            assert!((got - p(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn cartesian_quadratic_exact() {
        let g = Geometry::covering(SolverMode::Cartesian2d, 0.1, 2.0);
        let f = |x: Point| 1.0 + x[0] - 2.0 * x[1] + 0.5 * x[0] * x[0] + 0.3 * x[0] * x[1] - x[1] * x[1];
        let s = load(g, f, |_| 0.0, 0.01);
        let p = [0.537, -0.211];
        let lf = local_fields(&s, p).unwrap();
        assert!((lf.u[0] - f(p)).abs() < 1e-12);
        assert!((lf.grad[0][0] - (1.0 + p[0] + 0.3 * p[1])).abs() < 1e-12);
        assert!((lf.grad[0][1] - (-2.0 + 0.3 * p[0] - 2.0 * p[1])).abs() < 1e-12);
        let [xx, xy, yy] = lf.hess[1];
        assert!((xx - 1.0).abs() < 1e-9 && (xy - 0.3).abs() < 1e-9 && (yy + 2.0).abs() < 1e-9);
    }

    #[test]
    fn radial_even_profile_near_axis() {
        let g = Geometry::covering(SolverMode::Radial, 0.05, 3.0);
        let f = |x: Point| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            2.0 - r2 + 0.1 * r2 * r2
        };
        let s = load(g, f, |_| 0.0, 0.01);
        for &r in &[0.03, 0.1, 0.77] {
            let ang: f64 = 0.4;
            let p = [r * ang.cos(), r * ang.sin()];
            let lf = local_fields(&s, p).unwrap();
            assert!((lf.u[0] - f(p)).abs() < 1e-5, "r={r}");
            let ur = -2.0 * r + 0.4 * r * r * r;
            assert!((lf.grad[0][0] - ur * ang.cos()).abs() < 1e-3, "r={r}");
            // radial Ω² vanishes analytically
            assert!(lf.angular2(p, 0).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_domain() {
        let g = Geometry::covering(SolverMode::Radial, 0.1, 1.0);
        let s = load(g, |_| 0.0, |_| 0.0, 0.01);
        assert!(matches!(local_fields(&s, [10.0, 0.0]), Err(SolverError::OutOfDomain { .. })));
        let g = Geometry::covering(SolverMode::Cartesian2d, 0.1, 1.0);
        let s = load(g, |_| 0.0, |_| 0.0, 0.01);
        assert!(local_fields(&s, [0.0, 1.35]).is_err());
    }
}
