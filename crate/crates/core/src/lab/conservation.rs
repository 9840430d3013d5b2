use std::path::Path;

use rayon::prelude::*;

use super::report::{write_rows, write_with, Assertion, Report};
use super::{fmt_row, observed_orders, refinement_levels, LabError};
use crate::model::ScenarioConfig;
use crate::solver::{run_simulation, EnergyTrace, RunSetup};

/// Below this the difference residual is rounding noise and no order is measurable.
const ROUNDING_FLOOR: f64 = 1e-13;

/// Largest rise of `E₁² + E₂²` over any earlier value, relative to the initial sum.
pub(crate) fn max_total_increase(trace: &EnergyTrace) -> f64 {
    let Some(first) = trace.first() else { return 0.0 };
    let scale = first.sum().max(1e-300);
    let mut low = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for r in &trace.records {
        low = low.min(r.sum());
        worst = worst.max(r.sum() - low);
    }
    worst / scale
}

pub(crate) fn run(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    let data = config.data.with_epsilon(config.epsilons[0]);
    let base = RunSetup::from_config(config);
    let levels = refinement_levels(config);
    let traces: Vec<EnergyTrace> = report.timed("runs", || {
        levels
            .par_iter()
            .map(|&h| run_simulation(&base.with_h(h), &data, true, &mut []))
            .collect::<Result<_, _>>()
    })?;

    write_with(&out.join("energy.csv"), |w| traces[0].write_csv(w))?;
    let diff: Vec<f64> = traces.iter().map(|t| t.difference_residual()).collect();
    let balance: Vec<f64> = traces.iter().map(|t| t.balance_residual()).collect();
    write_rows(
        &out.join("refinement.csv"),
        "h,difference_residual,balance_residual",
        (0..levels.len()).map(|k| fmt_row(&[levels[k], diff[k], balance[k]])),
    )?;

    report.value("h", &levels);
    report.value("difference_residual", &diff);
    report.value("balance_residual", &balance);
    report.check(Assertion::at_most(
        "difference_residual",
        diff[0],
        config.threshold("difference_residual", 5e-3),
    ));
    report.check(Assertion::at_most(
        "balance_residual",
        balance[0],
        config.threshold("balance_residual", 5e-3),
    ));
    report.check(Assertion::at_most(
        "total_energy_increase",
        max_total_increase(&traces[0]),
        config.threshold("total_energy_increase", 5e-3),
    ));

    let orders = observed_orders(&diff);
    report.value("difference_orders", &orders);
    let finest = *diff.last().unwrap_or(&0.0);
    let order = *orders.last().unwrap_or(&f64::NAN);
    let min_order = config.threshold("order", 1.8);
    if finest <= ROUNDING_FLOOR {
        report.check(
            Assertion::holds("difference_order", true)
                .with_note(format!("residual {finest:e} is at rounding level; order not measurable")),
        );
    } else {
        report.check(Assertion::at_least("difference_order", order, min_order));
    }
    Ok(())
}
