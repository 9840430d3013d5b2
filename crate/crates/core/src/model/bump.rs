use serde::{Deserialize, Serialize};

use super::ModelError;

/// A point in the plane.
pub type Point = [f64; 2];

/// Smooth mollifier bump `A·exp(1 − 1/(1 − |x−c|²/R²))`, supported in the
/// closed disk of radius `R` about `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
}

/// Value, gradient and Hessian of a function at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    /// `[∂₁₁, ∂₁₂, ∂₂₂]`
    pub hess: [f64; 3],
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: 0.0,
        grad: [0.0; 2],
        hess: [0.0; 3],
    };

    /// `(d·∇) φ`
    #[inline]
    pub fn directional(&self, d: [f64; 2]) -> f64 {
        d[0] * self.grad[0] + d[1] * self.grad[1]
    }

    /// `(d·∇)² φ`
    #[inline]
    pub fn directional2(&self, d: [f64; 2]) -> f64 {
        d[0] * d[0] * self.hess[0] + 2.0 * d[0] * d[1] * self.hess[1] + d[1] * d[1] * self.hess[2]
    }

    #[inline]
    pub fn scaled(&self, s: f64) -> Jet {
        Jet {
            value: s * self.value,
            grad: [s * self.grad[0], s * self.grad[1]],
            hess: [s * self.hess[0], s * self.hess[1], s * self.hess[2]],
        }
    }

    #[inline]
    pub fn accumulate(&mut self, other: &Jet) {
        self.value += other.value;
        self.grad[0] += other.grad[0];
        self.grad[1] += other.grad[1];
        self.hess[0] += other.hess[0];
        self.hess[1] += other.hess[1];
        self.hess[2] += other.hess[2];
    }
}

/// Partial derivative selector `∂₁^dx ∂₂^dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiIndex {
    pub dx: u8,
    pub dy: u8,
}

impl MultiIndex {
    pub const VALUE: MultiIndex = MultiIndex { dx: 0, dy: 0 };

    pub const fn new(dx: u8, dy: u8) -> Self {
        MultiIndex { dx, dy }
    }

    pub fn order(&self) -> u32 {
        self.dx as u32 + self.dy as u32
    }
}

impl BumpSpec {
    pub fn new(center: Point, radius: f64, amplitude: f64) -> Result<Self, ModelError> {
        let spec = BumpSpec {
            center,
            radius,
            amplitude,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(ModelError::InvalidBump(format!(
                "radius must be positive and finite, got {}",
                self.radius
            )));
        }
        if !self.amplitude.is_finite() || !self.center.iter().all(|c| c.is_finite()) {
            return Err(ModelError::InvalidBump(
                "center and amplitude must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Distance from the origin to the farthest point of the support.
    pub fn outer_radius(&self) -> f64 {
        self.center[0].hypot(self.center[1]) + self.radius
    }

    /// Closed-form value and derivatives up to order two.
    #[inline]
    pub fn jet(&self, x: Point) -> Jet {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let inv_r2 = 1.0 / (self.radius * self.radius);
        let q = (dx * dx + dy * dy) * inv_r2;
        if q >= 1.0 {
            return Jet::ZERO;
        }
        // g(q) = exp(1 - w), w = 1/(1-q); g' = -g w², g'' = g w³ (w - 2)
        let w = 1.0 / (1.0 - q);
        let g = self.amplitude * (1.0 - w).exp();
        if g == 0.0 {
            return Jet::ZERO;
        }
        let w2 = w * w;
        let g1 = -g * w2;
        let g2 = g * w2 * w * (w - 2.0);
        let qx = 2.0 * dx * inv_r2;
        let qy = 2.0 * dy * inv_r2;
        let qxx = 2.0 * inv_r2;
        Jet {
            value: g,
            grad: [g1 * qx, g1 * qy],
            hess: [g2 * qx * qx + g1 * qxx, g2 * qx * qy, g2 * qy * qy + g1 * qxx],
        }
    }

    /// Value only; skips the derivative algebra.
    #[inline]
    pub fn value(&self, x: Point) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let q = (dx * dx + dy * dy) / (self.radius * self.radius);
        if q >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - q)).exp()
        }
    }
}

/// Evaluates `∂^α b(x)` for `|α| ≤ 2`.
pub fn eval_bump(spec: &BumpSpec, x: Point, derivative: MultiIndex) -> Result<f64, ModelError> {
    let jet = spec.jet(x);
    match (derivative.dx, derivative.dy) {
        (0, 0) => Ok(jet.value),
        (1, 0) => Ok(jet.grad[0]),
        (0, 1) => Ok(jet.grad[1]),
        (2, 0) => Ok(jet.hess[0]),
        (1, 1) => Ok(jet.hess[1]),
        (0, 2) => Ok(jet.hess[2]),
        _ => Err(ModelError::UnsupportedDerivative {
            dx: derivative.dx,
            dy: derivative.dy,
        }),
    }
}

/// Finite sum of bumps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BumpSum(pub Vec<BumpSpec>);

impl BumpSum {
    pub fn new(bumps: Vec<BumpSpec>) -> Self {
        BumpSum(bumps)
    }

    pub fn single(bump: BumpSpec) -> Self {
        BumpSum(vec![bump])
    }

    pub fn bumps(&self) -> &[BumpSpec] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn jet(&self, x: Point) -> Jet {
        let mut acc = Jet::ZERO;
        for b in &self.0 {
            acc.accumulate(&b.jet(x));
        }
        acc
    }

    pub fn value(&self, x: Point) -> f64 {
        self.0.iter().map(|b| b.value(x)).sum()
    }

    /// Largest `|c| + R` over the bumps, 0 when empty.
    pub fn outer_radius(&self) -> f64 {
        self.0.iter().map(BumpSpec::outer_radius).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> BumpSum {
        BumpSum(
            self.0
                .iter()
                .map(|b| BumpSpec {
                    amplitude: b.amplitude * factor,
                    ..*b
                })
                .collect(),
        )
    }

    /// Rotates every center about the origin by `angle`.
    pub fn rotated(&self, angle: f64) -> BumpSum {
        let (s, c) = angle.sin_cos();
        BumpSum(
            self.0
                .iter()
                .map(|b| BumpSpec {
                    center: [
                        c * b.center[0] - s * b.center[1],
                        s * b.center[0] + c * b.center[1],
                    ],
                    ..*b
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BumpSpec {
        BumpSpec::new([0.0, 0.0], 1.0, 1.0).unwrap()
    }

    #[test]
    fn center_value_is_amplitude() {
        assert_eq!(eval_bump(&unit(), [0.0, 0.0], MultiIndex::VALUE).unwrap(), 1.0);
        let b = BumpSpec::new([1.0, -2.0], 0.5, -3.5).unwrap();
        assert_eq!(b.value([1.0, -2.0]), -3.5);
    }

    #[test]
    fn outside_support_is_zero() {
        assert_eq!(eval_bump(&unit(), [2.0, 0.0], MultiIndex::VALUE).unwrap(), 0.0);
        assert_eq!(unit().jet([1.0, 0.0]), Jet::ZERO);
        assert_eq!(unit().jet([0.6, 0.8]), Jet::ZERO);
    }

    #[test]
    fn half_radius_value() {
        // exp(-1/3) to 17 digits, evaluated independently in 50-digit arithmetic.
        let expected = 0.716_531_310_573_789_3;
        let got = eval_bump(&unit(), [0.5, 0.0], MultiIndex::VALUE).unwrap();
        assert!((got - expected).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn third_order_rejected() {
        let err = eval_bump(&unit(), [0.1, 0.1], MultiIndex::new(2, 1)).unwrap_err();
        assert!(matches!(err, ModelError::UnsupportedDerivative { dx: 2, dy: 1 }));
    }

    #[test]
    fn invalid_radius_rejected() {
        assert!(BumpSpec::new([0.0, 0.0], -1.0, 1.0).is_err());
        assert!(BumpSpec::new([0.0, 0.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn continuous_at_boundary() {
        let b = unit();
        let inside = b.jet([1.0 - 1e-3, 0.0]);
        assert!(inside.value.abs() < 1e-200);
        assert!(inside.grad[0].abs() < 1e-200);
        assert!(inside.hess[0].abs() < 1e-200);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = BumpSpec::new([0.3, -0.2], 1.3, 0.8).unwrap();
        let step = 1e-4;
        let points = [[0.1, 0.2], [0.5, -0.6], [-0.4, 0.1], [0.9, 0.0], [0.3, 0.5]];
        for &p in &points {
            let jet = b.jet(p);
            let f = |dx: f64, dy: f64| b.value([p[0] + dx, p[1] + dy]);
            let fx = (f(step, 0.0) - f(-step, 0.0)) / (2.0 * step);
            let fy = (f(0.0, step) - f(0.0, -step)) / (2.0 * step);
            let fxx = (f(step, 0.0) - 2.0 * f(0.0, 0.0) + f(-step, 0.0)) / (step * step);
            let fyy = (f(0.0, step) - 2.0 * f(0.0, 0.0) + f(0.0, -step)) / (step * step);
            let fxy = (f(step, step) - f(step, -step) - f(-step, step) + f(-step, -step))
                / (4.0 * step * step);
            let rel = |a: f64, e: f64| (a - e).abs() / e.abs().max(1e-3);
            assert!(rel(jet.grad[0], fx) < 1e-6, "{p:?} fx {} {}", jet.grad[0], fx);
            assert!(rel(jet.grad[1], fy) < 1e-6);
            assert!(rel(jet.hess[0], fxx) < 1e-6, "{p:?} fxx {} {}", jet.hess[0], fxx);
            assert!(rel(jet.hess[1], fxy) < 1e-6);
            assert!(rel(jet.hess[2], fyy) < 1e-6);
        }
    }

    #[test]
    fn rotation_moves_centers() {
        let s = BumpSum::single(BumpSpec::new([1.0, 0.0], 0.5, 1.0).unwrap());
        let r = s.rotated(std::f64::consts::FRAC_PI_2);
        assert!(r.bumps()[0].center[0].abs() < 1e-15);
        assert!((r.bumps()[0].center[1] - 1.0).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn value_bounded_by_amplitude(
                cx in -2.0..2.0f64, cy in -2.0..2.0f64, r in 0.1..3.0f64,
                a in -5.0..5.0f64, x in -6.0..6.0f64, y in -6.0..6.0f64,
            ) {
                let b = BumpSpec::new([cx, cy], r, a).unwrap();
                let v = b.value([x, y]);
                let d = (x - cx).hypot(y - cy);
                if d >= r {
                    prop_assert_eq!(v, 0.0);
                } else {
                    prop_assert!(v.abs() <= a.abs());
                    prop_assert!(v == 0.0 || v.signum() == a.signum());
                }
            }
        }
    }
}
