use super::table::RadiationTable;
use super::RadiationError;
use crate::fit::linear_least_squares;

/// Minimum number of usable samples for a decay fit.
pub const MIN_FIT_POINTS: usize = 8;

/// Power-law fit of `|∂σF_j|` against `⟨σ⟩` for one component and angle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecayFit {
    /// 1 or 2.
    pub component: usize,
    pub theta: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// `⟨z⟩ = √(1 + z²)`
pub fn japanese_bracket(z: f64) -> f64 {
    (1.0 + z * z).sqrt()
}

/// Least-squares slope of `log|∂σF_j|` against `log⟨σ⟩` on `window`, for every
/// component and angle of the table.
pub fn fit_sigma_decay(table: &RadiationTable, window: (f64, f64)) -> Result<Vec<DecayFit>, RadiationError> {
    let (lo, hi) = window;
    let far = -2.0 * table.support_radius;
    if !(lo < hi) || hi >= far {
        return Err(RadiationError::InvalidWindow { lo, hi, far });
    }
    let mut fits = Vec::with_capacity(2 * table.theta_grid.len());
    for component in 0..2 {
        for (k, &theta) in table.theta_grid.iter().enumerate() {
            let (xs, ys): (Vec<f64>, Vec<f64>) = table
                .sigma_grid
                .iter()
                .enumerate()
                .filter(|(_, s)| **s >= lo && **s <= hi)
                .map(|(i, &s)| (s, table.df[component][table.index(i, k)]))
                .filter(|(_, d)| *d != 0.0 && d.is_finite())
                .map(|(s, d)| (japanese_bracket(s).ln(), d.abs().ln()))
                .unzip();
            if xs.len() < MIN_FIT_POINTS {
                return Err(RadiationError::DegenerateFit {
                    component: component + 1,
                    theta,
                    points: xs.len(),
                });
            }
            let fit = linear_least_squares(&xs, &ys).ok_or(RadiationError::DegenerateFit {
                component: component + 1,
                theta,
                points: xs.len(),
            })?;
            fits.push(DecayFit {
                component: component + 1,
                theta,
                slope: fit.slope,
                intercept: fit.intercept,
                r2: fit.r2,
                points: xs.len(),
            });
        }
    }
    Ok(fits)
}
