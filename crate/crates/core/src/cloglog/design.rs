use std::sync::OnceLock;

use super::{fisher_information, g_weight, InformationMatrix, ModelParams};
use crate::error::{invalid, Error, Result};

const NEWTON_ITERATIONS: usize = 100;
const GRADIENT_TOLERANCE: f64 = 1e-12;
const START_GRID: [f64; 8] = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];

/// Locally D-optimal two-point design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointDesign {
    pub z1: f64,
    pub z2: f64,
    pub x1: f64,
    pub x2: f64,
}

/// The standardized optimum `z1* > z2*` together with its information matrix
/// `J*` for one measurement at each point under `(a, b) = (1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardDesign {
    pub z1: f64,
    pub z2: f64,
    pub j_star: InformationMatrix,
    /// `sqrt(det J*)`.
    pub d_star: f64,
}

/// First and second derivatives of `ln g(z)`.
///
/// With `w = e^z`: `(ln g)' = 2 - q(w)`, `(ln g)'' = -w q'(w)` where
/// `q(w) = w / (1 - e^{-w})`.
fn log_g_derivatives(z: f64) -> (f64, f64) {
    let w = z.exp();
    if w < 1e-5 {
        let q = 1.0 + w / 2.0 + w * w / 12.0;
        let dq = 0.5 + w / 6.0;
        return (2.0 - q, -w * dq);
    }
    let m = -(-w).exp_m1();
    let q = w / m;
    let dq = (m - w * (-w).exp()) / (m * m);
    (2.0 - q, -w * dq)
}

/// `ln(g(z1) g(z2) (z1 - z2)^2)`; `-inf` off the `z1 > z2` branch.
fn log_objective(z1: f64, z2: f64) -> f64 {
    let gap = z1 - z2;
    if !(gap > 0.0) {
        return f64::NEG_INFINITY;
    }
    g_weight(z1).ln() + g_weight(z2).ln() + 2.0 * gap.ln()
}

/// Newton ascent on the log objective from one start. Returns the stationary
/// point if it converged to a local maximum.
fn newton_from(mut z1: f64, mut z2: f64) -> Option<(f64, f64)> {
    let mut value = log_objective(z1, z2);
    for _ in 0..NEWTON_ITERATIONS {
        let gap = z1 - z2;
        let (d1a, d2a) = log_g_derivatives(z1);
        let (d1b, d2b) = log_g_derivatives(z2);
        let grad = [d1a + 2.0 / gap, d1b - 2.0 / gap];
        let c = 2.0 / (gap * gap);
        let (h11, h12, h22) = (d2a - c, c, d2b - c);
        if grad[0].hypot(grad[1]) < GRADIENT_TOLERANCE {
            let det = h11 * h22 - h12 * h12;
            return (h11 < 0.0 && det > 0.0).then_some((z1, z2));
        }
        let det = h11 * h22 - h12 * h12;
        // Newton direction when the Hessian is negative definite, gradient
        // ascent otherwise.
        let (s1, s2) = if h11 < 0.0 && det > 0.0 {
            (-(h22 * grad[0] - h12 * grad[1]) / det, -(h11 * grad[1] - h12 * grad[0]) / det)
        } else {
            (grad[0], grad[1])
        };
        let mut step = 1.0;
        loop {
            let (c1, c2) = (z1 + step * s1, z2 + step * s2);
            let candidate = log_objective(c1, c2);
            if candidate >= value {
                z1 = c1;
                z2 = c2;
                value = candidate;
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                return None;
            }
        }
    }
    None
}

/// Maximizer of `g(z1) g(z2) (z1 - z2)^2` on the branch `z1 > z2`.
///
/// Multistart Newton from a grid over `[-4, 3]^2`; the best converged local
/// maximum is returned.
pub fn solve_optimal_design() -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for &s1 in &START_GRID {
        for &s2 in &START_GRID {
            if s1 <= s2 {
                continue;
            }
            if let Some((z1, z2)) = newton_from(s1, s2) {
                let value = log_objective(z1, z2);
                if best.is_none_or(|(_, _, v)| value > v) {
                    best = Some((z1, z2, value));
                }
            }
        }
    }
    best.map(|(z1, z2, _)| (z1, z2)).ok_or(Error::NonConvergence {
        what: "optimal design search",
        iterations: NEWTON_ITERATIONS,
    })
}

/// Process-wide cached [`StandardDesign`].
pub fn standard_design() -> Result<&'static StandardDesign> {
    static DESIGN: OnceLock<Result<StandardDesign>> = OnceLock::new();
    DESIGN
        .get_or_init(|| {
            let (z1, z2) = solve_optimal_design()?;
            let j_star = fisher_information(&ModelParams::standard(), &[z1, z2]);
            let d_star = j_star.det().sqrt();
            Ok(StandardDesign { z1, z2, j_star, d_star })
        })
        .as_ref()
        .map_err(Clone::clone)
}

/// Optimal covariates `x_i = (z_i* - b) / a` for the estimate `(a, b)`.
pub fn optimal_covariates(estimate: &ModelParams) -> Result<TwoPointDesign> {
    if !(estimate.a > 0.0 && estimate.a.is_finite()) || !estimate.b.is_finite() {
        return Err(invalid(format!(
            "estimate ({}, {}) cannot define a design; slope must be positive",
            estimate.a, estimate.b
        )));
    }
    let design = standard_design()?;
    Ok(TwoPointDesign {
        z1: design.z1,
        z2: design.z2,
        x1: estimate.covariate_for(design.z1),
        x2: estimate.covariate_for(design.z2),
    })
}
