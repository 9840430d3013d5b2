use crate::model::SolverMode;

/// Extra cells beyond the required extent so interpolation stencils near the
/// light cone stay inside the grid.
pub const MARGIN_CELLS: usize = 4;

/// Uniform grid geometry.
///
/// Cartesian: `n × n` nodes `x_i = (i − M)h`, `n = 2M + 1`, boundary nodes held at
/// zero. Radial: `n` cells at `r_i = (i + ½)h`, even reflection across the axis
/// and zero beyond the last cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub mode: SolverMode,
    pub h: f64,
    /// Nodes per axis (Cartesian) or radial cells.
    pub n: usize,
}

impl Geometry {
    /// Smallest grid covering `|x| ≤ extent` plus the stencil margin.
    pub fn covering(mode: SolverMode, h: f64, extent: f64) -> Self {
        let cells = (extent / h).ceil() as usize + MARGIN_CELLS;
        match mode {
            SolverMode::Cartesian2d => Geometry {
                mode,
                h,
                n: 2 * cells + 1,
            },
            SolverMode::Radial => Geometry { mode, h, n: cells },
        }
    }

    /// Index of the origin node along one Cartesian axis.
    #[inline]
    pub fn half(&self) -> usize {
        self.n / 2
    }

    pub fn len(&self) -> usize {
        match self.mode {
            SolverMode::Cartesian2d => self.n * self.n,
            SolverMode::Radial => self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest radius at which the grid still stores the field.
    pub fn extent(&self) -> f64 {
        match self.mode {
            SolverMode::Cartesian2d => self.half() as f64 * self.h,
            SolverMode::Radial => self.n as f64 * self.h,
        }
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        match self.mode {
            SolverMode::Cartesian2d => (i as f64 - self.half() as f64) * self.h,
            SolverMode::Radial => (i as f64 + 0.5) * self.h,
        }
    }

    /// Position of a flat index (radial cells lie on the positive x-axis).
    pub fn position(&self, idx: usize) -> [f64; 2] {
        match self.mode {
            SolverMode::Cartesian2d => [self.coord(idx % self.n), self.coord(idx / self.n)],
            SolverMode::Radial => [self.coord(idx), 0.0],
        }
    }

    /// Integration weight of one cell: `h²` or `2πr h`.
    #[inline]
    pub fn cell_measure(&self, idx: usize) -> f64 {
        match self.mode {
            SolverMode::Cartesian2d => self.h * self.h,
            SolverMode::Radial => 2.0 * std::f64::consts::PI * self.coord(idx) * self.h,
        }
    }

    /// Evaluates `f` at every node position.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        match self.mode {
            SolverMode::Cartesian2d => {
                for j in 1..self.n - 1 {
                    let y = self.coord(j);
                    for i in 1..self.n - 1 {
                        out[j * self.n + i] = f([self.coord(i), y]);
                    }
                }
            }
            SolverMode::Radial => {
                for (i, v) in out.iter_mut().enumerate() {
                    *v = f([self.coord(i), 0.0]);
                }
            }
        }
        out
    }
}
