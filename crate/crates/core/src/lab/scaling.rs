use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{write_rows, write_with, Assertion, Report};
use super::{fit_power_law, fmt_row, refinement_levels, LabError, PowerLawFit};
use crate::model::{ScenarioConfig, SolverMode};
use crate::profile::{uniform_times, write_estimates_csv, MEstimate, ProfileSampler, ProfileTrace, Ray};
use crate::radiation::{friedlander_table, RadiationTable};
use crate::solver::{run_simulation, time_step, RunSetup};

/// Results for one ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCase {
    pub eps: f64,
    pub t_eval: f64,
    /// Estimates on the finest grid, one per ray.
    pub estimates: Vec<MEstimate>,
    /// `max |m_direct − m_leading|` over the rays.
    pub max_residual: f64,
    /// `max |m_direct(h) − m_direct(h/2)|` over the rays, the discretization floor.
    pub floor: f64,
    /// `min |m_leading|` over the rays.
    pub min_leading: f64,
}

/// Per-ε m-estimates and the fitted remainder exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub epsilons: Vec<f64>,
    pub cases: Vec<ScalingCase>,
    /// Log–log fit of `max_residual` against ε.
    pub fit: PowerLawFit,
    /// Smallest ε whose leading term exceeds the floor by the required factor.
    pub check_eps: Option<f64>,
    /// `max |m_direct/ε² − (dF₁² − dF₂²)| / |dF₁² − dF₂²|` at `check_eps`.
    pub pointwise_rel: Option<f64>,
    /// Wall-clock seconds per ε, finest grid plus floor run.
    #[serde(skip)]
    pub runtimes: Vec<f64>,
}

impl ScalingReport {
    /// Assembles the report; ε must be strictly decreasing with at least three entries.
    pub fn new(cases: Vec<ScalingCase>, floor_factor: f64, runtimes: Vec<f64>) -> Result<Self, LabError> {
        let epsilons: Vec<f64> = cases.iter().map(|c| c.eps).collect();
        if epsilons.len() < 3 || epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(LabError::Domain(format!(
                "scaling study needs at least 3 strictly decreasing epsilons, got {epsilons:?}"
            )));
        }
        let residuals: Vec<f64> = cases.iter().map(|c| c.max_residual).collect();
        let fit = fit_power_law(&epsilons, &residuals)?;
        let check = cases
            .iter()
            .filter(|c| c.min_leading > floor_factor * c.floor)
            .min_by(|a, b| a.eps.total_cmp(&b.eps));
        let pointwise_rel = check.map(|c| {
            c.estimates
                .iter()
                .map(|e| (e.m_direct - e.m_leading).abs() / e.m_leading.abs())
                .fold(0.0, f64::max)
        });
        Ok(ScalingReport {
            epsilons,
            check_eps: check.map(|c| c.eps),
            cases,
            fit,
            pointwise_rel,
            runtimes,
        })
    }
}

fn rays(config: &ScenarioConfig) -> Vec<Ray> {
    config
        .sigma_samples
        .iter()
        .flat_map(|&s| config.theta_samples.iter().map(move |&th| Ray::new(s, th)))
        .collect()
}

/// Runs one ε on one grid; remainders are recorded every other step when requested.
fn run_case(
    config: &ScenarioConfig,
    eps: f64,
    h: f64,
    remainders: bool,
) -> Result<Vec<ProfileTrace>, LabError> {
    let t_eval = config.t_eval_factor / eps;
    let setup = RunSetup {
        h,
        final_time: t_eval,
        ..RunSetup::from_config(config)
    };
    let (dt, _) = time_step(&setup);
    let times = if remainders {
        uniform_times(0.0, t_eval, 2.0 * dt)
    } else {
        vec![t_eval]
    };
    let mut sampler = ProfileSampler::new(&rays(config), eps, dt, times, remainders);
    run_simulation(&setup, &config.data.with_epsilon(eps), true, &mut [&mut sampler])?;
    Ok(sampler.into_traces())
}

fn build_case(
    eps: f64,
    t_eval: f64,
    fine: &[ProfileTrace],
    coarse: &[ProfileTrace],
    table: &RadiationTable,
) -> Result<ScalingCase, LabError> {
    let estimates: Vec<MEstimate> = fine
        .iter()
        .map(|tr| MEstimate::from_trace(tr, table, t_eval))
        .collect::<Result<_, _>>()?;
    let mut floor: f64 = 0.0;
    for (e, c) in estimates.iter().zip(coarse) {
        floor = floor.max((e.m_direct - c.m_direct(t_eval)?).abs());
    }
    Ok(ScalingCase {
        eps,
        t_eval,
        max_residual: estimates.iter().map(|e| e.residual.abs()).fold(0.0, f64::max),
        min_leading: estimates.iter().map(|e| e.m_leading.abs()).fold(f64::INFINITY, f64::min),
        floor,
        estimates,
    })
}

pub(crate) fn run(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    if config.mode != SolverMode::Radial {
        return Err(LabError::Domain("the scaling study runs in radial mode".into()));
    }
    let levels = refinement_levels(config);
    let (h_fine, h_coarse) = (levels[levels.len() - 1], levels[levels.len() - 2]);
    let mut sigmas = config.sigma_samples.clone();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    let table = friedlander_table(&config.data, &sigmas, &[0.0])?;

    let jobs: Vec<(f64, bool)> = config
        .epsilons
        .iter()
        .flat_map(|&e| [(e, true), (e, false)])
        .collect();
    let results: Vec<(Vec<ProfileTrace>, f64)> = report.timed("runs", || {
        jobs.par_iter()
            .map(|&(eps, fine)| {
                let start = Instant::now();
                let h = if fine { h_fine } else { h_coarse };
                run_case(config, eps, h, fine).map(|t| (t, start.elapsed().as_secs_f64()))
            })
            .collect::<Result<_, _>>()
    })?;

    let mut cases = Vec::new();
    let mut runtimes = Vec::new();
    let trace_dir = out.join("traces");
    fs::create_dir_all(&trace_dir)?;
    for (k, &eps) in config.epsilons.iter().enumerate() {
        let (fine, t_fine) = &results[2 * k];
        let (coarse, t_coarse) = &results[2 * k + 1];
        let t_eval = config.t_eval_factor / eps;
        cases.push(build_case(eps, t_eval, fine, coarse, &table)?);
        runtimes.push(t_fine + t_coarse);
        for tr in fine {
            let name = format!("eps{eps}_sigma{}_theta{}.csv", tr.sigma, tr.theta);
            write_with(&trace_dir.join(name), |w| tr.write_csv(w))?;
        }
    }
    let scaling = ScalingReport::new(cases, config.threshold("floor_factor", 10.0), runtimes)?;

    let all: Vec<MEstimate> = scaling.cases.iter().flat_map(|c| c.estimates.clone()).collect();
    write_with(&out.join("estimates.csv"), |w| write_estimates_csv(&all, w))?;
    write_rows(
        &out.join("scaling.csv"),
        "eps,t_eval,max_residual,floor,min_leading",
        scaling
            .cases
            .iter()
            .map(|c| fmt_row(&[c.eps, c.t_eval, c.max_residual, c.floor, c.min_leading])),
    )?;

    report.value("h", [h_coarse, h_fine]);
    report.value("scaling", &scaling);
    report.check(Assertion::at_least("residual_slope", scaling.fit.slope, config.threshold("slope", 2.2)));
    let pointwise = scaling.pointwise_rel.unwrap_or(f64::NAN);
    let mut check = Assertion::at_most("pointwise_leading_rel", pointwise, config.threshold("pointwise", 0.15));
    if scaling.check_eps.is_none() {
        check = check.with_note("no epsilon has a leading term above the floor factor");
    }
    report.check(check);
    let consistency = all
        .iter()
        .map(|e| (e.m_corrected - e.m_direct).abs() / (e.eps * e.eps))
        .fold(0.0, f64::max);
    report.check(Assertion::at_most(
        "corrected_vs_direct_over_eps2",
        consistency,
        config.threshold("consistency", 5e-3),
    ));
    Ok(())
}
