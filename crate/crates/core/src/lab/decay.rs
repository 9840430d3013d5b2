use std::path::Path;

use super::report::{write_rows, write_with, Assertion, Report};
use super::LabError;
use crate::model::ScenarioConfig;
use crate::radiation::{default_sigma_grid, fit_sigma_decay, friedlander_table};

pub(crate) fn run(config: &ScenarioConfig, out: &Path, report: &mut Report) -> Result<(), LabError> {
    let data = &config.data;
    let r0 = data.support_radius();
    let sigma_grid = default_sigma_grid(r0);
    let mut thetas = config.theta_samples.clone();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let table = report.timed("table", || friedlander_table(data, &sigma_grid, &thetas))?;
    write_with(&out.join("radiation_table.csv"), |w| table.write_csv(w))?;

    let window = (config.threshold("window_lo", -40.0), config.threshold("window_hi", -10.0));
    let fits = fit_sigma_decay(&table, window)?;
    write_rows(
        &out.join("decay_fits.csv"),
        "component,theta,slope,intercept,r2,points",
        fits.iter().map(|f| {
            vec![
                f.component.to_string(),
                f.theta.to_string(),
                f.slope.to_string(),
                f.intercept.to_string(),
                f.r2.to_string(),
                f.points.to_string(),
            ]
        }),
    )?;
    let (lo, hi) = (config.threshold("slope_lo", -1.65), config.threshold("slope_hi", -1.35));
    // components without data carry no decay information
    for f in fits.iter().filter(|f| {
        let c = &data.components[f.component - 1];
        !(c.f.is_empty() && c.g.is_empty())
    }) {
        report.check(Assertion::within(
            &format!("decay_slope_c{}_theta{}", f.component, f.theta),
            f.slope,
            lo,
            hi,
        ));
    }
    report.value("fits", &fits);

    let beyond_support = sigma_grid
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > r0)
        .flat_map(|(i, _)| (0..thetas.len()).map(move |k| (i, k)))
        .map(|(i, k)| {
            let s = table.sample_at(i, k);
            s.f.iter().chain(&s.df).map(|v| v.abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report.check(Assertion::at_most("support_max_abs", beyond_support, 0.0));
    report.value("support_radius", r0);
    Ok(())
}
