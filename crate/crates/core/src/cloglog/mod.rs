//! Complementary log-log binary-response model.
//!
//! `P(Y = 1 | x) = 1 - exp(-exp(a x + b))`. The Fisher information of a design
//! `x_1, ..., x_n` is `sum_i g(z_i) (x_i^2, x_i; x_i, 1)` with `z_i = a x_i + b`
//! and weight `g(z) = e^{2z} / (e^{e^z} - 1)`. The D-criterion is
//! `sqrt(det J)`.

mod design;
mod information;
mod mle;

pub use design::{
    optimal_covariates, solve_optimal_design, standard_design, StandardDesign, TwoPointDesign,
};
pub use information::{d_criterion, fisher_information, InformationMatrix};
pub use mle::{fit_mle, has_finite_mle, score_and_information, MAX_NEWTON_ITERATIONS, SCORE_TOLERANCE};

use crate::error::{invalid, Result};

/// Linear predictors are clamped to this magnitude before exponentiation
/// in [`prob_response`].
pub const Z_CLAMP: f64 = 40.0;

/// Slope and intercept of the linear predictor `z = a x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
}

impl ModelParams {
    /// Validated constructor: `a` must be positive and both values finite.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid(format!("slope a must be positive and finite, got {a}")));
        }
        if !b.is_finite() {
            return Err(invalid(format!("intercept b must be finite, got {b}")));
        }
        Ok(ModelParams { a, b })
    }

    /// The standardized parameters `(a, b) = (1, 0)` under which `x = z`.
    pub const fn standard() -> Self {
        ModelParams { a: 1.0, b: 0.0 }
    }

    #[inline]
    pub fn linear_predictor(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    /// Covariate at which the linear predictor equals `z`.
    #[inline]
    pub fn covariate_for(&self, z: f64) -> f64 {
        (z - self.b) / self.a
    }
}

/// One binary measurement: covariate and response (`true` for `y = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub x: f64,
    pub y: bool,
}

impl Observation {
    pub fn new(x: f64, y: bool) -> Self {
        Observation { x, y }
    }

    /// Builds an observation from a 0/1 response code.
    pub fn from_code(x: f64, y: u8) -> Result<Self> {
        match y {
            0 => Ok(Observation { x, y: false }),
            1 => Ok(Observation { x, y: true }),
            _ => Err(invalid(format!("response must be 0 or 1, got {y}"))),
        }
    }
}

/// `P(Y = 1) = 1 - exp(-exp(a x + b))`.
pub fn prob_response(params: &ModelParams, x: f64) -> f64 {
    let z = params.linear_predictor(x).clamp(-Z_CLAMP, Z_CLAMP);
    -(-z.exp()).exp_m1()
}

/// `log P(Y = 1)` and `log P(Y = 0)` at linear predictor `z`, unclamped.
#[inline]
pub(crate) fn log_probs(z: f64) -> (f64, f64) {
    let w = z.exp();
    // log(1 - e^{-w}); underflows to -inf once w == 0.
    ((-(-w).exp_m1()).ln(), -w)
}

/// Log-likelihood of independent observations; `0` for empty data.
///
/// Returns `-inf` when a `y = 1` observation has a success probability that
/// underflows to zero (or a `y = 0` observation one that rounds to one).
pub fn log_likelihood(params: &ModelParams, data: &[Observation]) -> f64 {
    data.iter()
        .map(|obs| {
            let (log_p1, log_p0) = log_probs(params.linear_predictor(obs.x));
            if obs.y {
                log_p1
            } else {
                log_p0
            }
        })
        .sum()
}

/// Information weight `g(z) = e^{2z} / (e^{e^z} - 1)`.
///
/// Evaluated as `exp(2z - w - ln(1 - e^{-w}))` with `w = e^z`, which has no
/// cancellation for small `w` and no overflow for large `w`.
pub fn g_weight(z: f64) -> f64 {
    if z < -700.0 {
        // e^{e^z} - 1 == e^z to double precision.
        return z.exp();
    }
    let w = z.exp();
    if !w.is_finite() {
        return 0.0;
    }
    (2.0 * z - w - (-(-w).exp_m1()).ln()).exp()
}
