use std::path::Path;

use super::report::{write_rows, write_with, Assertion, Report};
use super::{fmt_row, LabError};
use crate::model::{ScenarioConfig, SolverMode};
use crate::profile::{m_leading, t0_sigma, uniform_times, ProfileSampler, Ray};
use crate::radiation::friedlander_table;
use crate::solver::{run_simulation, time_step, EnergyTrace, FieldState, RunSetup, Sampler, SolverError};

fn radial_setup(config: &ScenarioConfig, final_time: f64) -> Result<RunSetup, LabError> {
    if config.mode != SolverMode::Radial {
        return Err(LabError::Domain(format!("{} runs in radial mode", config.name)));
    }
    Ok(RunSetup {
        final_time,
        ..RunSetup::from_config(config)
    })
}

/// `min E_j²(t)/E_j²(0)` over records with `t ≥ from`.
fn min_energy_fraction(trace: &EnergyTrace, from: f64, component: usize) -> f64 {
    let e = |r: &crate::solver::EnergyRecord| if component == 0 { r.e1sq } else { r.e2sq };
    let Some(first) = trace.first() else { return f64::NAN };
    let e0 = e(first);
    trace
        .records
        .iter()
        .filter(|r| r.t >= from - 1e-12)
        .map(|r| e(r) / e0)
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn run_nondecay(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    let eps = config.epsilons[0];
    let t_final = config.t_eval_factor / eps;
    let setup = radial_setup(config, t_final)?;

    let mut sigmas = config.sigma_samples.clone();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    let table = friedlander_table(&config.data, &sigmas, &[0.0])?;
    write_with(&out.join("radiation_table.csv"), |w| table.write_csv(w))?;
    let leading: Vec<f64> = sigmas
        .iter()
        .map(|&s| m_leading(&table, eps, s, 0.0))
        .collect::<Result<_, _>>()?;
    let dominance = config.threshold("dominance", 2.0);
    let squares: Vec<[f64; 2]> = (0..sigmas.len())
        .map(|i| {
            let s = table.sample_at(i, 0);
            [s.df[0] * s.df[0], s.df[1] * s.df[1]]
        })
        .collect();
    let first_wins = squares.iter().any(|q| q[0] >= dominance * q[1] && q[0] > 0.0);
    let second_wins = squares.iter().any(|q| q[1] >= dominance * q[0] && q[1] > 0.0);
    report.check(Assertion::holds("precondition_crossing", first_wins && second_wins));
    report.value("sigma", &sigmas);
    report.value("m_leading", &leading);

    let (dt, _) = time_step(&setup);
    let rays: Vec<Ray> = sigmas.iter().map(|&s| Ray::new(s, 0.0)).collect();
    let mut sampler = ProfileSampler::new(&rays, eps, dt, vec![t_final], false);
    let trace = report.timed("run", || {
        run_simulation(&setup, &config.data.with_epsilon(eps), true, &mut [&mut sampler])
    })?;
    write_with(&out.join("energy.csv"), |w| trace.write_csv(w))?;

    let fraction = config.threshold("energy_fraction", 0.2);
    for j in 0..2 {
        report.check(Assertion::at_least(
            &format!("E{}sq_late_fraction", j + 1),
            min_energy_fraction(&trace, 0.5 * t_final, j),
            fraction,
        ));
    }

    let direct: Vec<f64> = sampler
        .traces()
        .iter()
        .map(|tr| tr.m_direct(t_final))
        .collect::<Result<_, _>>()?;
    write_rows(
        &out.join("m_estimates.csv"),
        "sigma,m_direct,m_leading",
        sigmas
            .iter()
            .zip(&direct)
            .zip(&leading)
            .map(|((s, d), l)| fmt_row(&[*s, *d, *l])),
    )?;
    report.value("m_direct", &direct);
    report.check(Assertion::holds(
        "m_sign_matches_leading",
        direct.iter().zip(&leading).all(|(d, l)| d * l > 0.0),
    ));
    Ok(())
}

/// Largest `|u₁ − u₂|` and `|∂ₜu₁ − ∂ₜu₂|` seen at the sample times.
struct SymmetryProbe {
    times: Vec<f64>,
    max_gap: f64,
}

impl Sampler for SymmetryProbe {
    fn sample_times(&self) -> Vec<f64> {
        self.times.clone()
    }

    fn sample(&mut self, state: &FieldState) -> Result<(), SolverError> {
        let pairs = [
            (state.field(0), state.field(1)),
            (state.velocity(0), state.velocity(1)),
            (state.previous(0), state.previous(1)),
        ];
        for (a, b) in pairs {
            for (x, y) in a.iter().zip(b) {
                self.max_gap = self.max_gap.max((x - y).abs());
            }
        }
        Ok(())
    }
}

/// `max_t |V(t)²(1 + V₀² log(t/t_s)) / V₀² − 1|` over samples with `t ≥ t_s`.
fn log_shape_deviation(times: &[f64], v: &[f64], t_s: f64) -> f64 {
    let Some(i0) = times.iter().position(|&t| t >= t_s - 1e-12) else {
        return f64::NAN;
    };
    let (ts, v0sq) = (times[i0], v[i0] * v[i0]);
    times[i0..]
        .iter()
        .zip(&v[i0..])
        .map(|(&t, &vt)| (vt * vt * (1.0 + v0sq * (t / ts).ln()) / v0sq - 1.0).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn run_symmetric(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    let eps = config.epsilons[0];
    let setup = radial_setup(config, config.final_time)?;
    report.check(Assertion::holds("precondition_symmetric_data", config.data.is_symmetric()));

    let (dt, _) = time_step(&setup);
    let rays: Vec<Ray> = config.sigma_samples.iter().map(|&s| Ray::new(s, 0.0)).collect();
    let spacing = config.threshold("profile_spacing", 0.1);
    let mut profiles = ProfileSampler::new(&rays, eps, dt, uniform_times(0.0, setup.final_time, spacing), false);
    let mut symmetry = SymmetryProbe {
        times: uniform_times(0.0, setup.final_time, setup.energy_cadence),
        max_gap: 0.0,
    };
    let trace = report.timed("run", || {
        run_simulation(
            &setup,
            &config.data.with_epsilon(eps),
            true,
            &mut [&mut profiles, &mut symmetry],
        )
    })?;
    write_with(&out.join("energy.csv"), |w| trace.write_csv(w))?;
    for tr in profiles.traces() {
        write_with(&out.join(format!("profile_sigma{}.csv", tr.sigma)), |w| tr.write_csv(w))?;
    }

    report.check(Assertion::at_most(
        "component_gap",
        symmetry.max_gap,
        config.threshold("symmetry", 1e-12),
    ));

    // interaction onset: the accumulated dissipation reaches a fixed share of its final value
    let total = trace.last().map_or(0.0, |r| r.cum_dissipation);
    let onset_share = config.threshold("onset_share", 1e-3);
    let onset = trace
        .records
        .iter()
        .position(|r| r.cum_dissipation >= onset_share * total)
        .unwrap_or(trace.len());
    let scale = trace.first().map_or(1.0, |r| r.sum());
    let worst_step = trace.records[onset.min(trace.len())..]
        .windows(2)
        .map(|w| (w[1].sum() - w[0].sum()) / scale)
        .fold(f64::NEG_INFINITY, f64::max);
    report.value("onset_time", trace.records.get(onset).map(|r| r.t));
    report.value("max_relative_energy_step", worst_step);
    report.check(Assertion::holds("total_energy_strictly_decreasing", total > 0.0 && worst_step < 0.0));

    let tol = config.threshold("log_shape", 0.2);
    let mut rows = Vec::new();
    for tr in profiles.traces() {
        let t_s = t0_sigma(tr.sigma).max(config.threshold("shape_start", 2.0));
        let dev = log_shape_deviation(&tr.times, &tr.v1, t_s);
        rows.push(fmt_row(&[tr.sigma, t_s, dev]));
        report.check(Assertion::at_most(&format!("log_shape_sigma{}", tr.sigma), dev, tol));
    }
    write_rows(&out.join("log_shape.csv"), "sigma,t_start,max_deviation", rows)?;
    Ok(())
}
