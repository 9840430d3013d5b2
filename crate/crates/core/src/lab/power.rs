use serde::Serialize;

use super::LabError;
use crate::fit::linear_least_squares;

/// `log y ≈ slope·log x + intercept`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least squares on `(log x, log y)`. Needs at least three points, all positive.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit, LabError> {
    if xs.len() != ys.len() {
        return Err(LabError::Domain(format!("{} abscissae but {} ordinates", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(LabError::Domain(format!("power-law fit needs at least 3 points, got {}", xs.len())));
    }
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(LabError::Domain(format!("power-law fit needs positive finite data, got {bad}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let fit = linear_least_squares(&lx, &ly).ok_or_else(|| LabError::Domain("all abscissae coincide".into()))?;
    Ok(PowerLawFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
    })
}
