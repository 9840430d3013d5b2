use std::path::Path;

use rayon::prelude::*;

use super::report::{write_rows, Assertion, Report};
use super::{fmt_row, LabError};
use crate::model::ScenarioConfig;
use crate::profile::{profile_invariant, truncated_profile_closed_form, truncated_profile_solve, ProfileError};

const T_START: f64 = 2.0;
const GRID: usize = 5;
const GRID_LO: f64 = 0.05;
const GRID_HI: f64 = 0.5;

/// Initial profiles with `|m| ≥ 1.2`, so that the losing component is far below
/// `10⁻⁶` after six decades, plus one `m = 0` pair.
const TRICHOTOMY_CASES: [(f64, f64); 5] = [(1.5, 0.5), (0.5, 1.5), (1.2, 0.3), (-1.4, 0.6), (0.6, 0.6)];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[derive(Debug, Clone, Copy)]
struct GridCheck {
    v10: f64,
    v20: f64,
    m: f64,
    closed_form_err: f64,
    power_law_err: f64,
    drift: f64,
}

fn grid_check(v10: f64, v20: f64, t_end: f64) -> Result<GridCheck, ProfileError> {
    let path = truncated_profile_solve(v10, v20, T_START, t_end)?;
    let m = profile_invariant(v10, v20);
    let p0 = v20 * v20;
    let mut closed_form_err: f64 = 0.0;
    let mut power_law_err: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for i in 0..path.len() {
        let t = path.times[i];
        let (c1, c2) = truncated_profile_closed_form(v10, v20, T_START, t);
        closed_form_err = closed_form_err.max(rel(path.v1[i], c1)).max(rel(path.v2[i], c2));
        let p = path.v2[i] * path.v2[i];
        let law = if m == 0.0 {
            rel(p, p0 / (1.0 + p0 * (t / T_START).ln()))
        } else {
            // V₂²/(V₂² + m) = A t^{−m}
            rel(p / (p + m), p0 / (p0 + m) * (t / T_START).powf(-m))
        };
        power_law_err = power_law_err.max(law);
        drift = drift.max((profile_invariant(path.v1[i], path.v2[i]) - m).abs());
    }
    Ok(GridCheck {
        v10,
        v20,
        m,
        closed_form_err,
        power_law_err,
        drift,
    })
}

#[derive(Debug, Clone, Copy)]
struct Terminal {
    v10: f64,
    v20: f64,
    m: f64,
    v1: f64,
    v2: f64,
    limit_err: f64,
    envelope_ok: bool,
}

/// Integrates to `t = 10⁶·t_start` and compares with the limits of the trichotomy.
fn terminal(v10: f64, v20: f64, delta: f64) -> Result<Terminal, ProfileError> {
    let t_end = 1e6 * T_START;
    let path = truncated_profile_solve(v10, v20, T_START, t_end)?;
    let (_, v1, v2) = path.last().ok_or_else(|| ProfileError::Integration("empty path".into()))?;
    let m = profile_invariant(v10, v20);
    let decades = t_end / T_START;
    let (limit_err, envelope_ok) = if m > 0.0 {
        (
            (v1 * v1 - m).abs(),
            v2.abs() <= v20.abs() * decades.powf(-m / 2.0 + delta) && v1 * v10 > 0.0,
        )
    } else if m < 0.0 {
        (
            (v2 * v2 + m).abs(),
            v1.abs() <= v10.abs() * decades.powf(m / 2.0 + delta) && v2 * v20 > 0.0,
        )
    } else {
        let want = v10 * v10 / (1.0 + v10 * v10 * decades.ln());
        (rel(v1 * v1, want).max(rel(v2 * v2, want)), v1.abs() < v10.abs() && v2.abs() < v20.abs())
    };
    Ok(Terminal {
        v10,
        v20,
        m,
        v1,
        v2,
        limit_err,
        envelope_ok,
    })
}

pub(crate) fn run(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    let t_end = config.threshold("t_end", 2e6);
    let axis: Vec<f64> = (0..GRID)
        .map(|k| GRID_LO + (GRID_HI - GRID_LO) * k as f64 / (GRID - 1) as f64)
        .collect();
    let pairs: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    let checks: Vec<GridCheck> = report.timed("grid", || {
        pairs
            .par_iter()
            .map(|&(a, b)| grid_check(a, b, t_end))
            .collect::<Result<_, _>>()
    })?;
    write_rows(
        &out.join("profile_grid.csv"),
        "v10,v20,m,closed_form_err,power_law_err,invariant_drift",
        checks
            .iter()
            .map(|c| fmt_row(&[c.v10, c.v20, c.m, c.closed_form_err, c.power_law_err, c.drift])),
    )?;
    let cf = checks.iter().map(|c| c.closed_form_err.max(c.power_law_err)).fold(0.0, f64::max);
    let drift = checks.iter().map(|c| c.drift).fold(0.0, f64::max);
    report.check(Assertion::at_most("closed_form_rel_err", cf, config.threshold("closed_form", 1e-8)));
    report.check(Assertion::at_most("invariant_drift", drift, config.threshold("drift", 1e-9)));

    let delta = config.threshold("delta", 0.05);
    let terms: Vec<Terminal> = report.timed("trichotomy", || {
        TRICHOTOMY_CASES
            .par_iter()
            .map(|&(a, b)| terminal(a, b, delta))
            .collect::<Result<_, _>>()
    })?;
    write_rows(
        &out.join("trichotomy.csv"),
        "v10,v20,m,v1_final,v2_final,limit_err",
        terms
            .iter()
            .map(|t| fmt_row(&[t.v10, t.v20, t.m, t.v1, t.v2, t.limit_err])),
    )?;
    let limit = terms.iter().map(|t| t.limit_err).fold(0.0, f64::max);
    report.check(Assertion::at_most("trichotomy_limit_err", limit, config.threshold("limit", 1e-6)));
    report.check(Assertion::holds(
        "trichotomy_survivor",
        terms.iter().all(|t| t.envelope_ok),
    ));
    Ok(())
}
