//! Maximum likelihood by damped Newton on the score.
//!
//! The cloglog log-likelihood is concave in `(a, b)`, so the observed
//! information is positive semidefinite everywhere and Newton steps with step
//! halving converge from any start once the MLE exists. Internally the fit
//! uses the centered intercept `c = b + a * mean(x)`, which keeps the Hessian
//! well conditioned when the covariates sit far from zero.

use super::{log_likelihood, InformationMatrix, ModelParams, Observation};
use crate::error::{Error, Result};

pub const MAX_NEWTON_ITERATIONS: usize = 100;
/// Convergence threshold on the Euclidean norm of the score in `(a, b)`.
pub const SCORE_TOLERANCE: f64 = 1e-8;
const MAX_HALVINGS: usize = 60;
const DECREMENT_TOLERANCE: f64 = 1e-14;

/// Score `dl/dz` and curvature `-d2l/dz2` of one observation.
#[inline]
fn obs_derivatives(z: f64, y: bool) -> (f64, f64) {
    let w = z.exp();
    if !y {
        return (-w, w);
    }
    // l = ln(1 - e^{-w}); dl/dz = r(w) = w e^{-w} / (1 - e^{-w}),
    // d2l/dz2 = w r'(w) with r'(w) = e^{-w} (1 - e^{-w} - w) / (1 - e^{-w})^2.
    if w == 0.0 {
        return (1.0, 0.0);
    }
    if w < 1e-5 {
        let r = 1.0 - w / 2.0;
        let dr = -0.5 + w / 6.0;
        return (r, -w * dr);
    }
    if w > 700.0 {
        return (0.0, 0.0);
    }
    let e = (-w).exp();
    let m = -(-w).exp_m1();
    let r = w * e / m;
    let dr = e * (m - w) / (m * m);
    (r, -w * dr)
}

/// Score vector `(dl/da, dl/db)` and observed information at `params`.
pub fn score_and_information(params: &ModelParams, data: &[Observation]) -> ([f64; 2], InformationMatrix) {
    let mut score = [0.0; 2];
    let mut info = InformationMatrix::ZERO;
    for obs in data {
        let (s, curv) = obs_derivatives(params.linear_predictor(obs.x), obs.y);
        score[0] += s * obs.x;
        score[1] += s;
        info += InformationMatrix::from_point(curv, obs.x);
    }
    (score, info)
}

/// Whether the responses overlap so that a finite MLE exists.
///
/// With one covariate the MLE is finite iff neither response class lies
/// entirely on one side (inclusive) of the other.
pub fn has_finite_mle(data: &[Observation]) -> bool {
    let extremes = |y: bool| {
        data.iter()
            .filter(|o| o.y == y)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o.x), hi.max(o.x)))
    };
    let (min0, max0) = extremes(false);
    let (min1, max1) = extremes(true);
    if !min0.is_finite() || !min1.is_finite() {
        return false;
    }
    max0 > min1 && max1 > min0
}

struct Centered<'a> {
    data: &'a [Observation],
    center: f64,
}

impl Centered<'_> {
    fn to_params(&self, a: f64, c: f64) -> ModelParams {
        ModelParams { a, b: c - a * self.center }
    }

    fn log_likelihood(&self, a: f64, c: f64) -> f64 {
        log_likelihood(&self.to_params(a, c), self.data)
    }

    /// Score and observed information in `(a, c)` coordinates.
    fn derivatives(&self, a: f64, c: f64) -> ([f64; 2], InformationMatrix) {
        let mut score = [0.0; 2];
        let mut info = InformationMatrix::ZERO;
        for obs in self.data {
            let xc = obs.x - self.center;
            let (s, curv) = obs_derivatives(a * xc + c, obs.y);
            score[0] += s * xc;
            score[1] += s;
            info += InformationMatrix::from_point(curv, xc);
        }
        (score, info)
    }
}

/// Maximum likelihood estimate of `(a, b)` starting from `start`.
///
/// Stops once the score norm in `(a, b)` falls below [`SCORE_TOLERANCE`], or
/// when the Newton decrement drops below `1e-14 (1 + |l|)`, where the
/// likelihood gain left is at the round-off level of `l`. The result must have a positive slope.
pub fn fit_mle(data: &[Observation], start: &ModelParams) -> Result<ModelParams> {
    if !has_finite_mle(data) {
        return Err(Error::Separation);
    }
    let center = data.iter().map(|o| o.x).sum::<f64>() / data.len() as f64;
    let problem = Centered { data, center };
    let (mut a, mut c) = (start.a, start.b + start.a * center);
    let mut ll = problem.log_likelihood(a, c);
    if !ll.is_finite() {
        // Start inside the support: the intercept matching the overall rate.
        let rate = data.iter().filter(|o| o.y).count() as f64 / data.len() as f64;
        a = if a.is_finite() && a > 0.0 { a } else { 1.0 };
        c = (-(1.0 - rate).ln()).ln();
        ll = problem.log_likelihood(a, c);
        if !ll.is_finite() {
            a = 0.0;
            ll = problem.log_likelihood(a, c);
        }
    }

    for _ in 0..MAX_NEWTON_ITERATIONS {
        let (score, info) = problem.derivatives(a, c);
        let original = [score[0] + center * score[1], score[1]];
        if original[0].hypot(original[1]) < SCORE_TOLERANCE {
            return finish(problem.to_params(a, c));
        }
        let det = info.det();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::NonConvergence { what: "maximum likelihood", iterations: MAX_NEWTON_ITERATIONS });
        }
        let step = [
            (info.j22 * score[0] - info.j12 * score[1]) / det,
            (info.j11 * score[1] - info.j12 * score[0]) / det,
        ];
        let decrement = step[0] * score[0] + step[1] * score[1];
        if decrement.abs() <= DECREMENT_TOLERANCE * (1.0 + ll.abs()) {
            return finish(problem.to_params(a, c));
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let (na, nc) = (a + t * step[0], c + t * step[1]);
            let candidate = problem.log_likelihood(na, nc);
            if candidate >= ll {
                a = na;
                c = nc;
                ll = candidate;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NonConvergence { what: "maximum likelihood", iterations: MAX_NEWTON_ITERATIONS })
}

fn finish(params: ModelParams) -> Result<ModelParams> {
    if params.a > 0.0 && params.a.is_finite() && params.b.is_finite() {
        Ok(params)
    } else {
        Err(Error::NonPositiveSlope(params.a))
    }
}
