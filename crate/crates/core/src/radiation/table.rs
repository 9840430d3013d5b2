use std::io::Write;

use rayon::prelude::*;

use super::abel::half_integral_r2_multi;
use super::radon::bump_line_jets;
use super::RadiationError;
use crate::model::{ComponentData, InitialData};

pub const DEFAULT_SIGMA_MIN: f64 = -50.0;
pub const DEFAULT_SIGMA_STEP: f64 = 0.05;
pub const DEFAULT_THETA_COUNT: usize = 16;

/// Sampled radiation fields `F_j(σ,ω)` and `∂σF_j(σ,ω)` per unit amplitude
/// (no ε factor), stored σ-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationTable {
    pub sigma_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub support_radius: f64,
    pub f: [Vec<f64>; 2],
    pub df: [Vec<f64>; 2],
}

/// `F` and `∂σF` of both components at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadiationSample {
    pub f: [f64; 2],
    pub df: [f64; 2],
}

/// `σ ∈ [−50, R₀+1]` with step 0.05.
pub fn default_sigma_grid(support_radius: f64) -> Vec<f64> {
    let hi = support_radius + 1.0;
    let n = ((hi - DEFAULT_SIGMA_MIN) / DEFAULT_SIGMA_STEP).round() as usize;
    (0..=n).map(|i| DEFAULT_SIGMA_MIN + DEFAULT_SIGMA_STEP * i as f64).collect()
}

/// 16 equispaced angles, or the single angle 0 for radial data.
pub fn default_theta_grid(radial: bool) -> Vec<f64> {
    if radial {
        vec![0.0]
    } else {
        equispaced_angles(DEFAULT_THETA_COUNT)
    }
}

pub fn equispaced_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64)
        .collect()
}

fn strictly_increasing(v: &[f64]) -> bool {
    !v.is_empty() && v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

/// `(F, ∂σF)` of one component at `(σ, ω)` per unit amplitude.
pub fn component_radiation(data: &ComponentData, sigma: f64, omega: [f64; 2], support_radius: f64) -> (f64, f64) {
    if sigma >= support_radius {
        return (0.0, 0.0);
    }
    let mut breaks = Vec::with_capacity(2 * (data.f.bumps().len() + data.g.bumps().len()));
    for b in data.f.bumps().iter().chain(data.g.bumps()) {
        let p = b.center[0] * omega[0] + b.center[1] * omega[1];
        breaks.push(p - b.radius);
        breaks.push(p + b.radius);
    }
    // [R[(ω·∇)f], R[(ω·∇)²f], R[g], R[(ω·∇)g]]
    let r2 = half_integral_r2_multi(
        |s| {
            let mut acc = [0.0; 4];
            for b in data.f.bumps() {
                let v = bump_line_jets(b, s, omega);
                acc[0] += v[1];
                acc[1] += v[2];
            }
            for b in data.g.bumps() {
                let v = bump_line_jets(b, s, omega);
                acc[2] += v[0];
                acc[3] += v[1];
            }
            acc
        },
        sigma,
        support_radius,
        &breaks,
    );
    // F = −∂σR₂[f] + R₂[g], ∂σF = −∂σ²R₂[f] + ∂σR₂[g]
    (-r2[0] + r2[2], -r2[1] + r2[3])
}

/// Fills `F_j = −∂σR₂[f_j] + R₂[g_j]` and `∂σF_j` on the given grids.
///
/// `∂σ^k R₂[φ]` is `R₂` applied to `s ↦ R[(ω·∇)^k φ](s, ω)`, so no singular
/// integral is ever differenced.
pub fn friedlander_table(
    data: &InitialData,
    sigma_grid: &[f64],
    theta_grid: &[f64],
) -> Result<RadiationTable, RadiationError> {
    if !strictly_increasing(sigma_grid) {
        return Err(RadiationError::InvalidGrid("sigma grid must be non-empty and strictly increasing"));
    }
    if !strictly_increasing(theta_grid) {
        return Err(RadiationError::InvalidGrid("theta grid must be non-empty and strictly increasing"));
    }
    let r0 = data.support_radius();
    let ntheta = theta_grid.len();
    let cells: Vec<[f64; 4]> = (0..sigma_grid.len() * ntheta)
        .into_par_iter()
        .map(|idx| {
            let sigma = sigma_grid[idx / ntheta];
            let theta = theta_grid[idx % ntheta];
            let omega = [theta.cos(), theta.sin()];
            let (f1, d1) = component_radiation(&data.components[0], sigma, omega, r0);
            let (f2, d2) = component_radiation(&data.components[1], sigma, omega, r0);
            [f1, d1, f2, d2]
        })
        .collect();
    if let Some(idx) = cells.iter().position(|c| !c.iter().all(|v| v.is_finite())) {
        return Err(RadiationError::NonFinite {
            sigma: sigma_grid[idx / ntheta],
            theta: theta_grid[idx % ntheta],
        });
    }
    Ok(RadiationTable {
        sigma_grid: sigma_grid.to_vec(),
        theta_grid: theta_grid.to_vec(),
        support_radius: r0,
        f: [cells.iter().map(|c| c[0]).collect(), cells.iter().map(|c| c[2]).collect()],
        df: [cells.iter().map(|c| c[1]).collect(), cells.iter().map(|c| c[3]).collect()],
    })
}

impl RadiationTable {
    #[inline]
    pub fn index(&self, i_sigma: usize, i_theta: usize) -> usize {
        i_sigma * self.theta_grid.len() + i_theta
    }

    pub fn sample_at(&self, i_sigma: usize, i_theta: usize) -> RadiationSample {
        let k = self.index(i_sigma, i_theta);
        RadiationSample {
            f: [self.f[0][k], self.f[1][k]],
            df: [self.df[0][k], self.df[1][k]],
        }
    }

    /// `∂σF_j` column for one angle.
    pub fn df_column(&self, component: usize, i_theta: usize) -> Vec<f64> {
        (0..self.sigma_grid.len())
            .map(|i| self.df[component][self.index(i, i_theta)])
            .collect()
    }

    pub fn f_column(&self, component: usize, i_theta: usize) -> Vec<f64> {
        (0..self.sigma_grid.len())
            .map(|i| self.f[component][self.index(i, i_theta)])
            .collect()
    }

    /// Bilinear interpolation in `(σ, θ)`, periodic in `θ`. Exactly zero above
    /// the support radius.
    pub fn interpolate(&self, sigma: f64, theta: f64) -> Result<RadiationSample, RadiationError> {
        if sigma > self.support_radius {
            return Ok(RadiationSample::default());
        }
        let sg = &self.sigma_grid;
        let last = *sg.last().expect("validated non-empty");
        if sigma < sg[0] || sigma > last || !sigma.is_finite() {
            return Err(RadiationError::Extrapolation {
                sigma,
                lo: sg[0],
                hi: last,
            });
        }
        let (i0, ws) = if sg.len() == 1 {
            (0, 0.0)
        } else {
            let i = sg.partition_point(|&s| s <= sigma).clamp(1, sg.len() - 1) - 1;
            (i, (sigma - sg[i]) / (sg[i + 1] - sg[i]))
        };
        let i1 = (i0 + 1).min(sg.len() - 1);

        let tg = &self.theta_grid;
        let (k0, k1, wt) = if tg.len() == 1 {
            (0, 0, 0.0)
        } else {
            let period = 2.0 * std::f64::consts::PI;
            let th = tg[0] + (theta - tg[0]).rem_euclid(period);
            let k = tg.partition_point(|&t| t <= th).max(1) - 1;
            if k + 1 < tg.len() {
                (k, k + 1, (th - tg[k]) / (tg[k + 1] - tg[k]))
            } else {
                (k, 0, (th - tg[k]) / (tg[0] + period - tg[k]))
            }
        };

        let mut out = RadiationSample::default();
        for j in 0..2 {
            let lerp = |col: &[f64]| {
                let a = col[self.index(i0, k0)] * (1.0 - ws) + col[self.index(i1, k0)] * ws;
                let b = col[self.index(i0, k1)] * (1.0 - ws) + col[self.index(i1, k1)] * ws;
                a * (1.0 - wt) + b * wt
            };
            out.f[j] = lerp(&self.f[j]);
            out.df[j] = lerp(&self.df[j]);
        }
        Ok(out)
    }

    /// CSV with columns `sigma,theta,F1,dF1,F2,dF2`, σ-major.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "sigma,theta,F1,dF1,F2,dF2")?;
        for (i, s) in self.sigma_grid.iter().enumerate() {
            for (k, t) in self.theta_grid.iter().enumerate() {
                let idx = self.index(i, k);
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s, t, self.f[0][idx], self.df[0][idx], self.f[1][idx], self.df[1][idx]
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BumpSpec, BumpSum};

    fn data(f1: Vec<BumpSpec>, g1: Vec<BumpSpec>, f2: Vec<BumpSpec>, g2: Vec<BumpSpec>) -> InitialData {
        InitialData::new(
            [
                ComponentData {
                    f: BumpSum(f1),
                    g: BumpSum(g1),
                },
                ComponentData {
                    f: BumpSum(f2),
                    g: BumpSum(g2),
                },
            ],
            1.0,
        )
        .unwrap()
    }

    fn b(c: [f64; 2], r: f64, a: f64) -> BumpSpec {
        BumpSpec::new(c, r, a).unwrap()
    }

    fn coarse_sigma() -> Vec<f64> {
        (0..60).map(|i| -6.0 + 0.15 * i as f64).collect()
    }

    #[test]
    fn zero_data_zero_table() {
        let d = data(vec![], vec![], vec![], vec![]);
        let t = friedlander_table(&d, &coarse_sigma(), &[0.0, 1.0]).unwrap();
        assert!(t.f.iter().chain(&t.df).all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn identical_components_identical_columns() {
        let f = vec![b([0.2, 0.1], 1.0, 1.0)];
        let g = vec![b([-0.3, 0.0], 0.7, -0.5)];
        let d = data(f.clone(), g.clone(), f, g);
        let t = friedlander_table(&d, &coarse_sigma(), &[0.0, 2.0]).unwrap();
        assert_eq!(t.f[0], t.f[1]);
        assert_eq!(t.df[0], t.df[1]);
    }

    #[test]
    fn linear_in_data() {
        let d = data(
            vec![b([0.2, 0.1], 1.0, 1.0)],
            vec![b([-0.3, 0.0], 0.7, -0.5)],
            vec![b([0.0, 0.4], 0.9, 0.3)],
            vec![],
        );
        let mut doubled = d.clone();
        for c in doubled.components.iter_mut() {
            c.f = c.f.scaled(2.0);
            c.g = c.g.scaled(2.0);
        }
        let grid = coarse_sigma();
        let t1 = friedlander_table(&d, &grid, &[0.0, 1.5]).unwrap();
        let t2 = friedlander_table(&doubled, &grid, &[0.0, 1.5]).unwrap();
        for j in 0..2 {
            for (a, b) in t1.f[j].iter().zip(&t2.f[j]).chain(t1.df[j].iter().zip(&t2.df[j])) {
                assert!((2.0 * a - b).abs() <= 8.0 * f64::EPSILON * b.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn vanishes_above_support() {
        let d = data(vec![b([0.5, 0.5], 1.0, 1.0)], vec![b([0.0, -0.5], 0.5, 1.0)], vec![], vec![]);
        let r0 = d.support_radius();
        let grid: Vec<f64> = (0..20).map(|i| r0 - 0.5 + 0.1 * i as f64).collect();
        let t = friedlander_table(&d, &grid, &equispaced_angles(8)).unwrap();
        for (i, s) in grid.iter().enumerate() {
            if *s > r0 {
                for k in 0..8 {
                    let c = t.sample_at(i, k);
                    assert_eq!(c, RadiationSample::default());
                }
            }
        }
    }

    #[test]
    fn radial_columns_identical() {
        let d = data(vec![b([0.0, 0.0], 1.0, 1.0)], vec![b([0.0, 0.0], 1.5, 0.3)], vec![], vec![]);
        let t = friedlander_table(&d, &coarse_sigma(), &equispaced_angles(6)).unwrap();
        for i in 0..t.sigma_grid.len() {
            let ref_cell = t.sample_at(i, 0);
            for k in 1..6 {
                let c = t.sample_at(i, k);
                assert!((c.f[0] - ref_cell.f[0]).abs() <= 1e-10);
                assert!((c.df[0] - ref_cell.df[0]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn rotation_equivariance() {
        let d = data(
            vec![b([0.8, -0.2], 0.9, 1.0)],
            vec![b([-0.4, 0.6], 0.6, -0.7)],
            vec![],
            vec![b([0.3, 0.3], 0.5, 1.2)],
        );
        let alpha = 0.37;
        let thetas = [0.1, 0.9, 2.0, 4.0];
        let shifted: Vec<f64> = thetas.iter().map(|t| t + alpha).collect();
        let grid = coarse_sigma();
        let t1 = friedlander_table(&d, &grid, &thetas).unwrap();
        let t2 = friedlander_table(&d.rotated(alpha), &grid, &shifted).unwrap();
        for j in 0..2 {
            for (a, b) in t1.f[j].iter().zip(&t2.f[j]).chain(t1.df[j].iter().zip(&t2.df[j])) {
                assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn df_consistent_with_differenced_f() {
        // Observed order of centered differences of F against the dF column.
        let d = data(vec![b([0.0, 0.0], 1.0, 1.0)], vec![b([0.3, 0.0], 0.8, 0.6)], vec![], vec![]);
        let sigmas = [-2.0, -0.5, 0.4];
        let mut errs = Vec::new();
        for step in [0.1, 0.05, 0.025] {
            let mut worst: f64 = 0.0;
            for &s in &sigmas {
                let grid = [s - step, s, s + step];
                let t = friedlander_table(&d, &grid, &[0.3]).unwrap();
                let fd = (t.f[0][2] - t.f[0][0]) / (2.0 * step);
                worst = worst.max((fd - t.df[0][1]).abs());
            }
            errs.push(worst);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order1 >= 1.9 && order2 >= 1.9, "errors {errs:?}");
    }

    #[test]
    fn interpolation_and_errors() {
        let d = data(vec![b([0.0, 0.0], 1.0, 1.0)], vec![], vec![], vec![b([0.0, 0.0], 1.0, 1.0)]);
        let grid = coarse_sigma();
        let t = friedlander_table(&d, &grid, &[0.0]).unwrap();
        let at = t.interpolate(grid[10], 1.234).unwrap();
        assert_eq!(at, t.sample_at(10, 0));
        assert_eq!(t.interpolate(5.0, 0.0).unwrap(), RadiationSample::default());
        assert!(matches!(t.interpolate(-100.0, 0.0), Err(RadiationError::Extrapolation { .. })));
    }

    #[test]
    fn periodic_theta_interpolation() {
        let d = data(vec![b([0.5, 0.0], 0.8, 1.0)], vec![], vec![], vec![]);
        let thetas = equispaced_angles(4);
        let t = friedlander_table(&d, &[-1.0, 0.0], &thetas).unwrap();
        let last = t.sample_at(0, 3).df[0];
        let first = t.sample_at(0, 0).df[0];
        let mid = t.interpolate(-1.0, 2.0 * std::f64::consts::PI - std::f64::consts::FRAC_PI_4).unwrap();
        assert!((mid.df[0] - 0.5 * (last + first)).abs() < 1e-14);
        let wrapped = t.interpolate(-1.0, -std::f64::consts::FRAC_PI_4).unwrap();
        assert!((wrapped.df[0] - mid.df[0]).abs() < 1e-14);
    }

    #[test]
    fn csv_layout() {
        let d = data(vec![b([0.0, 0.0], 1.0, 1.0)], vec![], vec![], vec![]);
        let t = friedlander_table(&d, &[-1.0, 0.0, 2.0], &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sigma,theta,F1,dF1,F2,dF2");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("-1,0,"));
        assert!(lines[2].starts_with("-1,1,"));
        assert!(lines[6].starts_with("2,1,0,0,0,0"));
    }

    #[test]
    fn rejects_bad_grids() {
        let d = data(vec![], vec![], vec![], vec![]);
        assert!(friedlander_table(&d, &[0.0, 0.0], &[0.0]).is_err());
        assert!(friedlander_table(&d, &[0.0], &[]).is_err());
    }
}
