use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;

use super::report::{write_rows, Assertion, Report};
use super::{fit_power_law, fmt_row, max_or_nan, observed_orders, refinement_levels, LabError};
use crate::model::{InitialData, Point, ScenarioConfig};
use crate::radiation::component_radiation;
use crate::solver::{free_oracle_eval, local_fields, run_simulation, FieldState, RunSetup, Sampler, SolverError};

const TIMES: usize = 4;
const POINTS_PER_TIME: usize = 5;
const RAY_TIMES: usize = 8;

/// Values `u_j` and `[∂ₜ, ∂₁, ∂₂]u_j` at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PointValues {
    t: f64,
    x: Point,
    u: [f64; 2],
    du: [[f64; 3]; 2],
}

/// Points spread over the light-cone interior, `POINTS_PER_TIME` per time.
fn probe_points(t: f64, r0: f64) -> Vec<Point> {
    (0..POINTS_PER_TIME)
        .map(|i| {
            let phi = 0.4 + 2.0 * PI * i as f64 / POINTS_PER_TIME as f64;
            let rho = (0.15 + 0.17 * i as f64) * (r0 + t);
            [rho * phi.cos(), rho * phi.sin()]
        })
        .collect()
}

struct PointSampler {
    times: Vec<f64>,
    r0: f64,
    next: usize,
    values: Vec<PointValues>,
}

impl Sampler for PointSampler {
    fn sample_times(&self) -> Vec<f64> {
        self.times.clone()
    }

    fn sample(&mut self, state: &FieldState) -> Result<(), SolverError> {
        let nominal = self.times[self.next];
        self.next += 1;
        for x in probe_points(nominal, self.r0) {
            let lf = local_fields(state, x)?;
            self.values.push(PointValues {
                t: state.time(),
                x,
                u: lf.u,
                du: [0, 1].map(|j| [lf.ut[j], lf.grad[j][0], lf.grad[j][1]]),
            });
        }
        Ok(())
    }
}

fn max_errors(grid: &[PointValues], data: &InitialData) -> (f64, f64, Vec<[f64; 2]>) {
    let per_point: Vec<[f64; 2]> = grid
        .par_iter()
        .map(|p| {
            let o = free_oracle_eval(data, p.t, p.x);
            let mut eu: f64 = 0.0;
            let mut edu: f64 = 0.0;
            for j in 0..2 {
                eu = eu.max((p.u[j] - o.u[j]).abs());
                for a in 0..3 {
                    edu = edu.max((p.du[j][a] - o.du[j][a]).abs());
                }
            }
            [eu, edu]
        })
        .collect();
    let eu = per_point.iter().map(|e| e[0]).fold(0.0, f64::max);
    let edu = per_point.iter().map(|e| e[1]).fold(0.0, f64::max);
    (eu, edu, per_point)
}

/// `max_{j,a} |r^{1/2}∂_a u⁰_j − ω_a ε∂σF_j(σ, ω)|` with `ω₀ = −1`.
fn radiation_gap(data: &InitialData, sigma: f64, theta: f64, t: f64, r0: f64) -> f64 {
    let omega = [theta.cos(), theta.sin()];
    let r = t + sigma;
    let o = free_oracle_eval(data, t, [r * omega[0], r * omega[1]]);
    let w = [-1.0, omega[0], omega[1]];
    let mut gap: f64 = 0.0;
    for j in 0..2 {
        let (_, df) = component_radiation(&data.components[j], sigma, omega, r0);
        for a in 0..3 {
            gap = gap.max((r.sqrt() * o.du[j][a] - w[a] * data.epsilon * df).abs());
        }
    }
    gap
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

pub(crate) fn run(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    let eps = config.epsilons[0];
    let data = config.data.with_epsilon(eps);
    let r0 = data.support_radius();
    let t_final = config.final_time;
    let times: Vec<f64> = (1..=TIMES).map(|k| t_final * k as f64 / TIMES as f64).collect();
    let levels = refinement_levels(config);
    let base = RunSetup::from_config(config);

    let samples: Vec<Vec<PointValues>> = report.timed("solver", || {
        levels
            .par_iter()
            .map(|&h| {
                let mut s = PointSampler {
                    times: times.clone(),
                    r0,
                    next: 0,
                    values: Vec::new(),
                };
                run_simulation(&base.with_h(h), &data, false, &mut [&mut s])?;
                Ok::<_, SolverError>(s.values)
            })
            .collect::<Result<_, _>>()
    })?;

    let errors: Vec<(f64, f64, Vec<[f64; 2]>)> =
        report.timed("oracle", || samples.iter().map(|s| max_errors(s, &data)).collect());
    let combined: Vec<f64> = errors.iter().map(|e| e.0.max(e.1)).collect();

    let mut rows = Vec::new();
    for (k, level) in samples.iter().enumerate() {
        for (p, e) in level.iter().zip(&errors[k].2) {
            rows.push(fmt_row(&[levels[k], p.t, p.x[0], p.x[1], p.u[0], p.u[1], e[0], e[1]]));
        }
    }
    write_rows(&out.join("free_points.csv"), "h,t,x,y,u1,u2,err_u,err_du", rows)?;

    let factor = config.threshold("error_factor", 5.0);
    let worst_ratio = combined
        .iter()
        .zip(&levels)
        .map(|(e, h)| e / (h * h))
        .fold(0.0, f64::max);
    report.value("h", &levels);
    report.value("max_error_u", errors.iter().map(|e| e.0).collect::<Vec<_>>());
    report.value("max_error_du", errors.iter().map(|e| e.1).collect::<Vec<_>>());
    report.value("error_orders", observed_orders(&combined));
    report.check(Assertion::at_most("error_over_h2", worst_ratio, factor));
    let order = fit_power_law(&levels, &combined).map(|f| f.slope).unwrap_or(f64::NAN);
    report.check(Assertion::at_least("error_order", order, config.threshold("order", 1.9)));

    let rays: Vec<(f64, f64)> = config
        .sigma_samples
        .iter()
        .flat_map(|&s| config.theta_samples.iter().map(move |&th| (s, th)))
        .collect();
    let t_hi = config.threshold("ray_time_factor", 40.0) / eps;
    let ray_times = geometric(config.threshold("ray_start", 5.0), t_hi, RAY_TIMES);
    let gaps: Vec<Vec<f64>> = report.timed("radiation_rays", || {
        rays.par_iter()
            .map(|&(s, th)| ray_times.iter().map(|&t| radiation_gap(&data, s, th, t, r0)).collect())
            .collect()
    });
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for ((s, th), g) in rays.iter().zip(&gaps) {
        for (t, v) in ray_times.iter().zip(g) {
            rows.push(fmt_row(&[*s, *th, *t, *v]));
        }
        slopes.push(fit_power_law(&ray_times, g).map(|f| f.slope).unwrap_or(f64::NAN));
    }
    write_rows(&out.join("radiation_approach.csv"), "sigma,theta,t,gap", rows)?;
    report.value("radiation_gap_slopes", &slopes);
    let worst = max_or_nan(&slopes);
    report.check(Assertion::at_most(
        "radiation_gap_slope",
        worst,
        config.threshold("gap_slope", -0.8),
    ));
    Ok(())
}
