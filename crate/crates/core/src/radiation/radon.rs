use crate::model::{BumpSpec, BumpSum};
use crate::quadrature;

/// Gauss–Legendre nodes per bump radius of chord length.
pub const LINE_NODES_PER_RADIUS: usize = 32;

/// Power of the directional derivative `(ω·∇)^k` applied before integrating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionalOrder {
    Zero,
    One,
    Two,
}

impl DirectionalOrder {
    pub fn index(self) -> usize {
        match self {
            DirectionalOrder::Zero => 0,
            DirectionalOrder::One => 1,
            DirectionalOrder::Two => 2,
        }
    }
}

/// `[R[φ], R[(ω·∇)φ], R[(ω·∇)²φ]]` of one bump along `{y·ω = s}`.
#[inline]
pub fn bump_line_jets(bump: &BumpSpec, s: f64, omega: [f64; 2]) -> [f64; 3] {
    let p = bump.center[0] * omega[0] + bump.center[1] * omega[1];
    let offset = s - p;
    let r = bump.radius;
    if offset.abs() >= r {
        return [0.0; 3];
    }
    let half = (r * r - offset * offset).sqrt();
    let perp = [-omega[1], omega[0]];
    let q = bump.center[0] * perp[0] + bump.center[1] * perp[1];
    let base = [s * omega[0], s * omega[1]];
    let panels = ((2.0 * half / r).ceil() as usize).max(1);
    let rule = quadrature::rule(LINE_NODES_PER_RADIUS);
    let width = 2.0 * half / panels as f64;
    let mut acc = [0.0; 3];
    for k in 0..panels {
        let lo = q - half + width * k as f64;
        let part = rule.integrate_n(lo, lo + width, |tau| {
            let jet = bump.jet([base[0] + tau * perp[0], base[1] + tau * perp[1]]);
            [jet.value, jet.directional(omega), jet.directional2(omega)]
        });
        for i in 0..3 {
            acc[i] += part[i];
        }
    }
    acc
}

/// All three directional orders of the line integral of a bump sum.
pub fn radon_line_jets(phi: &BumpSum, s: f64, omega: [f64; 2]) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for b in phi.bumps() {
        let v = bump_line_jets(b, s, omega);
        for i in 0..3 {
            acc[i] += v[i];
        }
    }
    acc
}

/// `R[(ω·∇)^k φ](s, ω) = ∫_{y·ω=s} (ω·∇)^k φ(y) dS_y`.
///
/// Each bump is integrated over its own support chord, so the result is exactly
/// zero once the line misses every support disk.
pub fn radon_line_integral(phi: &BumpSum, s: f64, omega: [f64; 2], order: DirectionalOrder) -> f64 {
    radon_line_jets(phi, s, omega)[order.index()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    fn radial() -> BumpSum {
        BumpSum::new(vec![
            BumpSpec::new([0.0, 0.0], 1.0, 1.0).unwrap(),
            BumpSpec::new([0.0, 0.0], 2.0, -0.4).unwrap(),
        ])
    }

    fn off_center() -> BumpSum {
        BumpSum::new(vec![
            BumpSpec::new([0.7, -0.3], 1.2, 1.5).unwrap(),
            BumpSpec::new([-1.0, 0.8], 0.6, -2.0).unwrap(),
        ])
    }

    fn dir(theta: f64) -> [f64; 2] {
        [theta.cos(), theta.sin()]
    }

    #[test]
    fn zero_function() {
        let phi = BumpSum::default();
        assert_eq!(radon_line_jets(&phi, 0.3, dir(0.4)), [0.0; 3]);
    }

    #[test]
    fn outside_support_exact_zero() {
        let phi = off_center();
        let r0 = phi.outer_radius();
        for k in 0..8 {
            let w = dir(k as f64 * 0.7);
            assert_eq!(radon_line_jets(&phi, r0 + 1e-9, w), [0.0; 3]);
            assert_eq!(radon_line_jets(&phi, -r0 - 0.5, w), [0.0; 3]);
        }
    }

    #[test]
    fn radial_independent_of_angle() {
        let phi = radial();
        for &s in &[-1.5, -0.3, 0.0, 0.9] {
            let vals: Vec<[f64; 3]> = (0..8)
                .map(|k| radon_line_jets(&phi, s, dir(k as f64 * std::f64::consts::PI / 4.0 + 0.1)))
                .collect();
            for i in 0..3 {
                let lo = vals.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min);
                let hi = vals.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max);
                assert!(hi - lo <= 1e-10, "s={s} order {i}: spread {}", hi - lo);
            }
        }
    }

    /// Independent 2D tensor-product Gauss–Legendre quadrature over each bump's
    /// bounding square.
    fn mass_oracle(phi: &BumpSum) -> f64 {
        let rule = GaussLegendre::new(48);
        let mut total = 0.0;
        for b in phi.bumps() {
            let panels = 6;
            let w = 2.0 * b.radius / panels as f64;
            for px in 0..panels {
                for py in 0..panels {
                    let x0 = b.center[0] - b.radius + w * px as f64;
                    let y0 = b.center[1] - b.radius + w * py as f64;
                    total += rule.integrate(x0, x0 + w, |x| rule.integrate(y0, y0 + w, |y| b.value([x, y])));
                }
            }
        }
        total
    }

    #[test]
    fn mass_identity() {
        for phi in [radial(), off_center()] {
            let oracle = mass_oracle(&phi);
            let r0 = phi.outer_radius();
            for k in 0..4 {
                let w = dir(0.3 + k as f64);
                // s ↦ R[φ](s) is smooth with flat ends, so one fine rule suffices.
                let mass = quadrature::rule(64).composite(-r0, r0, 16, |s| radon_line_jets(&phi, s, w)[0]);
                assert!(((mass - oracle) / oracle).abs() <= 1e-8, "mass {mass} oracle {oracle}");
            }
        }
    }

    #[test]
    fn derivative_orders_match_s_derivatives() {
        // R[(ω·∇)^k φ](s) = ∂_s^k R[φ](s)
        let phi = off_center();
        let w = dir(1.1);
        let step = 2e-4;
        for &s in &[-0.8, 0.1, 0.6] {
            let c = radon_line_jets(&phi, s, w);
            let p = radon_line_jets(&phi, s + step, w)[0];
            let m = radon_line_jets(&phi, s - step, w)[0];
            let d1 = (p - m) / (2.0 * step);
            let d2 = (p - 2.0 * c[0] + m) / (step * step);
            assert!((c[1] - d1).abs() < 1e-5 * c[1].abs().max(1.0), "{} {}", c[1], d1);
            assert!((c[2] - d2).abs() < 1e-4 * c[2].abs().max(1.0), "{} {}", c[2], d2);
        }
    }
}
