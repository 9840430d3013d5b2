use std::f64::consts::{FRAC_PI_2, PI};

use crate::model::{BumpSpec, InitialData, Point};
use crate::quadrature;

/// Free solution `u⁰_j` and `[∂ₜ, ∂₁, ∂₂]u⁰_j` at one spacetime point, ε included.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FreeValues {
    pub u: [f64; 2],
    pub du: [[f64; 3]; 2],
}

/// Quadrature density of the Poisson-formula oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResolution {
    /// Gauss–Legendre nodes per panel in both directions.
    pub nodes: usize,
    /// Maximal panel length as a fraction of the bump radius.
    pub panel_fraction: f64,
}

impl Default for OracleResolution {
    fn default() -> Self {
        OracleResolution {
            nodes: 32,
            panel_fraction: 0.25,
        }
    }
}

/// Free-wave solution with data `(εf_j, εg_j)` by Poisson's formula.
pub fn free_oracle_eval(data: &InitialData, t: f64, x: Point) -> FreeValues {
    free_oracle_eval_with(data, t, x, OracleResolution::default())
}

/// Poisson's formula over the backward light disk `|y − x| < t`, written in
/// polar coordinates about `x` with `p = t sin α`. The substitution absorbs the
/// `(t² − p²)^{−1/2}` rim singularity:
///
/// ```text
/// u   = (1/2π)∫∫ [f + p∂_p f + t g] sin α dα dφ
/// ∂ₜu = (1/2π)∫∫ [2 sin α ∂_p f + p sin α ∂_pp f + g + p∂_p g] sin α dα dφ
/// ∂ᵢu = (1/2π)∫∫ [∂ᵢf + p ∂ᵢ∂_p f + t ∂ᵢg] sin α dα dφ
/// ```
///
/// Each bump is integrated only over the part of the disk meeting its support.
pub fn free_oracle_eval_with(data: &InitialData, t: f64, x: Point, res: OracleResolution) -> FreeValues {
    let eps = data.epsilon;
    let mut out = FreeValues::default();
    if t <= 0.0 {
        for (j, c) in data.components.iter().enumerate() {
            let f = c.f.jet(x);
            out.u[j] = eps * f.value;
            out.du[j] = [eps * c.g.value(x), eps * f.grad[0], eps * f.grad[1]];
        }
        return out;
    }
    for (j, c) in data.components.iter().enumerate() {
        let mut acc = [0.0; 4];
        for b in c.f.bumps() {
            let part = bump_contribution(b, t, x, res, Kind::Position);
            for i in 0..4 {
                acc[i] += part[i];
            }
        }
        for b in c.g.bumps() {
            let part = bump_contribution(b, t, x, res, Kind::Velocity);
            for i in 0..4 {
                acc[i] += part[i];
            }
        }
        let scale = eps / (2.0 * PI);
        out.u[j] = scale * acc[0];
        out.du[j] = [scale * acc[1], scale * acc[2], scale * acc[3]];
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Position,
    Velocity,
}

/// `[u, ∂ₜu, ∂₁u, ∂₂u]` integrals (without the `1/2π` and ε) of one bump.
fn bump_contribution(b: &BumpSpec, t: f64, x: Point, res: OracleResolution, kind: Kind) -> [f64; 4] {
    let rel = [b.center[0] - x[0], b.center[1] - x[1]];
    let d = rel[0].hypot(rel[1]);
    let r = b.radius;
    let lo = (d - r).max(0.0);
    let hi = (d + r).min(t);
    if lo >= hi {
        return [0.0; 4];
    }
    let phi_c = rel[1].atan2(rel[0]);
    let max_panel = r * res.panel_fraction;
    let rule = quadrature::rule(res.nodes);

    let mut cuts = vec![lo];
    if d < r && r - d > lo && r - d < hi {
        cuts.push(r - d);
    }
    cuts.push(hi);

    let mut acc = [0.0; 4];
    for win in cuts.windows(2) {
        let (pa, pb) = (win[0], win[1]);
        let panels = ((pb - pa) / max_panel).ceil().max(1.0) as usize;
        let width = (pb - pa) / panels as f64;
        for k in 0..panels {
            let p0 = pa + width * k as f64;
            let p1 = if k + 1 == panels { pb } else { p0 + width };
            let a0 = (p0 / t).min(1.0).asin();
            let a1 = if p1 >= t { FRAC_PI_2 } else { (p1 / t).asin() };
            let part = rule.integrate_n(a0, a1, |alpha| {
                let (s, co) = alpha.sin_cos();
                let p = if co <= 0.0 { t } else { t * s };
                let arc = arc_integral(b, x, p, d, phi_c, s, t, max_panel, res, kind);
                [arc[0] * s, arc[1] * s, arc[2] * s, arc[3] * s]
            });
            for i in 0..4 {
                acc[i] += part[i];
            }
        }
    }
    acc
}

/// Integral over the arc `{φ : |x + p e_φ − c| < R}` of the bracketed integrands.
#[allow(clippy::too_many_arguments)]
fn arc_integral(
    b: &BumpSpec,
    x: Point,
    p: f64,
    d: f64,
    phi_c: f64,
    sin_alpha: f64,
    t: f64,
    max_panel: f64,
    res: OracleResolution,
    kind: Kind,
) -> [f64; 4] {
    let r = b.radius;
    let (start, span) = if d < r && p <= r - d {
        (0.0, 2.0 * PI)
    } else {
        if p <= 0.0 {
            return [0.0; 4];
        }
        let cos_beta = ((d * d + p * p - r * r) / (2.0 * d * p)).clamp(-1.0, 1.0);
        let beta = cos_beta.acos();
        if beta <= 0.0 {
            return [0.0; 4];
        }
        (phi_c - beta, 2.0 * beta)
    };
    let panels = ((span * p) / max_panel).ceil().max(1.0) as usize;
    let width = span / panels as f64;
    let rule = quadrature::rule(res.nodes);
    let mut acc = [0.0; 4];
    for k in 0..panels {
        let lo = start + width * k as f64;
        let part = rule.integrate_n(lo, lo + width, |phi| {
            let e = [phi.cos(), phi.sin()];
            let jet = b.jet([x[0] + p * e[0], x[1] + p * e[1]]);
            let dp = jet.directional(e);
            let he = [
                jet.hess[0] * e[0] + jet.hess[1] * e[1],
                jet.hess[1] * e[0] + jet.hess[2] * e[1],
            ];
            match kind {
                Kind::Position => [
                    jet.value + p * dp,
                    2.0 * sin_alpha * dp + p * sin_alpha * jet.directional2(e),
                    jet.grad[0] + p * he[0],
                    jet.grad[1] + p * he[1],
                ],
                Kind::Velocity => [t * jet.value, jet.value + p * dp, t * jet.grad[0], t * jet.grad[1]],
            }
        });
        for i in 0..4 {
            acc[i] += part[i];
        }
    }
    acc
}
