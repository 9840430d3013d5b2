//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON document so the page needs no generated types.

use serde_json::json;
use wasm_bindgen::prelude::*;
use wavelab_core::model::{parse_scenario, ScenarioConfig, SolverMode};
use wavelab_core::profile::{profile_invariant, truncated_profile_closed_form, truncated_profile_solve};
use wavelab_core::radiation::friedlander_table;
use wavelab_core::solver::{run_simulation, RunSetup};

/// Upper bound on grid cells per axis accepted from the page.
pub const MAX_CELLS: f64 = 4096.0;

fn config(text: &str) -> Result<ScenarioConfig, String> {
    parse_scenario(text).map_err(|e| e.to_string())
}

/// `F_j` and `∂σF_j` along `θ = 0` on `n` equispaced σ values in `[lo, hi]`.
pub fn radiation_profile_json(config_text: &str, lo: f64, hi: f64, n: usize) -> Result<String, String> {
    if n < 2 || !(lo < hi) {
        return Err(format!("need n ≥ 2 and lo < hi, got n = {n}, [{lo}, {hi}]"));
    }
    let cfg = config(config_text)?;
    let sigma: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let table = friedlander_table(&cfg.data, &sigma, &[0.0]).map_err(|e| e.to_string())?;
    Ok(json!({
        "sigma": sigma,
        "f": [table.f_column(0, 0), table.f_column(1, 0)],
        "df": [table.df_column(0, 0), table.df_column(1, 0)],
        "support_radius": table.support_radius,
    })
    .to_string())
}

/// Energy trace of a nonlinear radial run with the grid and data of the configuration.
pub fn energy_trace_json(config_text: &str) -> Result<String, String> {
    let cfg = config(config_text)?;
    let setup = RunSetup {
        mode: SolverMode::Radial,
        ..RunSetup::from_config(&cfg)
    };
    let cells = (cfg.support_radius() + setup.final_time) / setup.h;
    if cells > MAX_CELLS {
        return Err(format!("{cells:.0} radial cells exceeds the demo limit of {MAX_CELLS}"));
    }
    let trace = run_simulation(&setup, &cfg.data, true, &mut []).map_err(|e| e.to_string())?;
    let col = |f: fn(&wavelab_core::solver::EnergyRecord) -> f64| trace.records.iter().map(f).collect::<Vec<_>>();
    Ok(json!({
        "t": trace.times(),
        "e1sq": col(|r| r.e1sq),
        "e2sq": col(|r| r.e2sq),
        "cum_dissipation": col(|r| r.cum_dissipation),
        "difference_residual": trace.difference_residual(),
        "balance_residual": trace.balance_residual(),
    })
    .to_string())
}

/// Adaptive solution of the profile system next to its closed form.
pub fn profile_ode_json(v10: f64, v20: f64, t_start: f64, t_end: f64) -> Result<String, String> {
    let path = truncated_profile_solve(v10, v20, t_start, t_end).map_err(|e| e.to_string())?;
    let exact: Vec<(f64, f64)> = path
        .times
        .iter()
        .map(|&t| truncated_profile_closed_form(v10, v20, t_start, t))
        .collect();
    Ok(json!({
        "m": profile_invariant(v10, v20),
        "t": path.times,
        "v1": path.v1,
        "v2": path.v2,
        "v1_exact": exact.iter().map(|e| e.0).collect::<Vec<_>>(),
        "v2_exact": exact.iter().map(|e| e.1).collect::<Vec<_>>(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn radiation_profile(config_text: &str, lo: f64, hi: f64, n: usize) -> Result<String, JsError> {
    radiation_profile_json(config_text, lo, hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn energy_trace(config_text: &str) -> Result<String, JsError> {
    energy_trace_json(config_text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn profile_ode(v10: f64, v20: f64, t_start: f64, t_end: f64) -> Result<String, JsError> {
    profile_ode_json(v10, v20, t_start, t_end).map_err(|e| JsError::new(&e))
}
