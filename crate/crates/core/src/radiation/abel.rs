use crate::quadrature;

/// Gauss–Legendre nodes per unit length of the substituted variable `τ`.
pub const ABEL_NODES_PER_UNIT: usize = 64;

const PREFACTOR: f64 = 1.0 / (2.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI);

/// `R₂[φ](σ) = (1/(2√2π)) ∫_σ^∞ R[φ](s)/√(s−σ) ds` for line values vanishing
/// beyond `support_radius`.
///
/// Substituting `s = σ + τ²` gives the smooth integral `2∫₀^{√(R₀−σ)} R[φ](σ+τ²) dτ`.
pub fn half_integral_r2(line_values: impl Fn(f64) -> f64, sigma: f64, support_radius: f64) -> f64 {
    half_integral_r2_multi(|s| [line_values(s)], sigma, support_radius, &[])[0]
}

/// Vector-valued variant with optional breakpoints: `s`-values where the line
/// values lose smoothness (support ends, jumps). Panels are split there so each
/// panel sees a smooth integrand.
pub fn half_integral_r2_multi<const N: usize>(
    mut line_values: impl FnMut(f64) -> [f64; N],
    sigma: f64,
    support_radius: f64,
    breakpoints: &[f64],
) -> [f64; N] {
    if sigma >= support_radius {
        return [0.0; N];
    }
    let tau_max = (support_radius - sigma).sqrt();
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(0.0);
    edges.extend(
        breakpoints
            .iter()
            .filter(|&&b| b > sigma && b < support_radius)
            .map(|&b| (b - sigma).sqrt()),
    );
    edges.push(tau_max);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let rule = quadrature::rule(ABEL_NODES_PER_UNIT);
    let mut acc = [0.0; N];
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let panels = ((b - a).ceil() as usize).max(1);
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let part = rule.integrate_n(lo, lo + width, |tau| line_values(sigma + tau * tau));
            for k in 0..N {
                acc[k] += part[k];
            }
        }
    }
    acc.map(|v| 2.0 * PREFACTOR * v)
}
