use serde::{Deserialize, Serialize};

use super::bump::{BumpSum, Jet, Point};
use super::ModelError;

/// Position (`f`) and velocity (`g`) data of one component.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentData {
    pub f: BumpSum,
    pub g: BumpSum,
}

/// Initial data `u_j(0) = ε f_j`, `∂ₜu_j(0) = ε g_j` for `j = 1, 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub components: [ComponentData; 2],
    pub epsilon: f64,
}

/// Field values at `t = 0` and one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitialValues {
    pub u: [f64; 2],
    pub grad_u: [[f64; 2]; 2],
    pub ut: [f64; 2],
}

impl InitialData {
    pub fn new(components: [ComponentData; 2], epsilon: f64) -> Result<Self, ModelError> {
        let data = InitialData {
            components,
            epsilon,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(ModelError::InvalidEpsilon(self.epsilon));
        }
        for c in &self.components {
            for b in c.f.bumps().iter().chain(c.g.bumps()) {
                b.validate()?;
            }
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> InitialData {
        InitialData {
            components: self.components.clone(),
            epsilon,
        }
    }

    /// `R₀ = max (|c| + R)` over every bump of both components.
    pub fn support_radius(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| [c.f.outer_radius(), c.g.outer_radius()])
            .fold(0.0, f64::max)
    }

    /// True when every bump is centered at the origin.
    pub fn is_radial(&self) -> bool {
        self.components.iter().all(|c| {
            c.f.bumps()
                .iter()
                .chain(c.g.bumps())
                .all(|b| b.center == [0.0, 0.0])
        })
    }

    /// Components 1 and 2 carry identical data.
    pub fn is_symmetric(&self) -> bool {
        self.components[0] == self.components[1]
    }

    /// Unscaled jets `(f_j, g_j)` at `x`.
    pub fn jets(&self, x: Point) -> [(Jet, Jet); 2] {
        [0, 1].map(|j| (self.components[j].f.jet(x), self.components[j].g.jet(x)))
    }

    pub fn rotated(&self, angle: f64) -> InitialData {
        InitialData {
            components: self.components.clone().map(|c| ComponentData {
                f: c.f.rotated(angle),
                g: c.g.rotated(angle),
            }),
            epsilon: self.epsilon,
        }
    }

    /// Swaps the labels of the two components.
    pub fn swapped(&self) -> InitialData {
        let [a, b] = self.components.clone();
        InitialData {
            components: [b, a],
            epsilon: self.epsilon,
        }
    }
}

/// `(εf_j(x), ε∇f_j(x), εg_j(x))` for both components.
pub fn build_initial_data(data: &InitialData, x: Point) -> InitialValues {
    let eps = data.epsilon;
    let mut out = InitialValues::default();
    for j in 0..2 {
        let f = data.components[j].f.jet(x);
        out.u[j] = eps * f.value;
        out.grad_u[j] = [eps * f.grad[0], eps * f.grad[1]];
        out.ut[j] = eps * data.components[j].g.value(x);
    }
    out
}
