//! Approximate accumulation model for the D-criterion.
//!
//! `h(D) = h* / (1 + e^eta D^theta)` is the expected gain in D per
//! measurement pair once the criterion has reached `D`, in the standardized
//! parameterization `(a, b) = (1, 0)`. This module also holds the
//! continuous-time limits of both dynamic programs (no update cost), which
//! serve as oracles for the grid solvers, and the Monte-Carlo procedures that
//! motivate the model.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::cloglog::{g_weight, standard_design, InformationMatrix, ModelParams, StandardDesign};
use crate::error::{invalid, Error, Result};
use crate::rng::{replication_rng, Rng};

pub const DEFAULT_H_STAR: f64 = 0.809_402_68;
pub const DEFAULT_ETA: f64 = 1.889_38;
pub const DEFAULT_THETA: f64 = -1.513_30;

/// Parameters of `h(D) = h_star / (1 + e^eta D^theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccumulationModel {
    pub h_star: f64,
    pub eta: f64,
    pub theta: f64,
}

impl Default for AccumulationModel {
    fn default() -> Self {
        AccumulationModel { h_star: DEFAULT_H_STAR, eta: DEFAULT_ETA, theta: DEFAULT_THETA }
    }
}

impl AccumulationModel {
    pub fn new(h_star: f64, eta: f64, theta: f64) -> Result<Self> {
        if !(h_star > 0.0 && h_star.is_finite()) {
            return Err(invalid(format!("h_star must be positive, got {h_star}")));
        }
        if !(theta < 0.0 && theta.is_finite()) || !eta.is_finite() {
            return Err(invalid(format!("need finite eta and theta < 0, got ({eta}, {theta})")));
        }
        Ok(AccumulationModel { h_star, eta, theta })
    }

    /// Expected gain per measurement pair at criterion `d > 0`.
    pub fn h(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::Domain(format!("h(D) needs D > 0, got {d}")));
        }
        Ok(self.h_unchecked(d))
    }

    #[inline]
    pub(crate) fn h_unchecked(&self, d: f64) -> f64 {
        self.h_star / (1.0 + (self.eta + self.theta * d.ln()).exp())
    }

    /// Continuous-limit minimal time `int_d^{d_final} ds / h(s)`.
    pub fn min_time_closed_form(&self, d: f64, d_final: f64) -> Result<f64> {
        if !(d > 0.0) || !(d <= d_final) {
            return Err(Error::Domain(format!("need 0 < D <= D_final, got D = {d}, D_final = {d_final}")));
        }
        let p = self.theta + 1.0;
        let power_part = if p.abs() < 1e-12 {
            (d_final / d).ln()
        } else {
            (d_final.powf(p) - d.powf(p)) / p
        };
        Ok(((d_final - d) + self.eta.exp() * power_part) / self.h_star)
    }

    /// Continuous-limit accumulated gain `D(T) - D` along `D' = h(D)`,
    /// `D(t) = d`, integrated with classical RK4.
    ///
    /// The step starts at `T / 1e5` and is halved until two successive
    /// results agree to `1e-8` relative.
    pub fn max_d_continuous(&self, d: f64, t: f64, horizon: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::Domain(format!("need D > 0, got {d}")));
        }
        if !(0.0 <= t && t <= horizon) {
            return Err(Error::Domain(format!("need 0 <= t <= T, got t = {t}, T = {horizon}")));
        }
        let span = horizon - t;
        if span == 0.0 {
            return Ok(0.0);
        }
        let base_step = horizon / 1e5;
        let mut steps = ((span / base_step).ceil() as usize).max(1);
        let mut previous = self.rk4(d, span, steps) - d;
        for _ in 0..12 {
            steps *= 2;
            let current = self.rk4(d, span, steps) - d;
            if (current - previous).abs() <= 1e-8 * current.abs() {
                return Ok(current);
            }
            previous = current;
        }
        Err(Error::NonConvergence { what: "RK4 step refinement", iterations: 12 })
    }

    fn rk4(&self, d0: f64, span: f64, steps: usize) -> f64 {
        let dt = span / steps as f64;
        let f = |d: f64| self.h_unchecked(d);
        let mut d = d0;
        for _ in 0..steps {
            let k1 = f(d);
            let k2 = f(d + 0.5 * dt * k1);
            let k3 = f(d + 0.5 * dt * k2);
            let k4 = f(d + dt * k3);
            d += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        d
    }
}

/// Draws `(a_hat, b_hat) ~ N((1, 0), J(D)^{-1})` with `J(D) = (D / h*) J*`,
/// rejecting draws with `a_hat <= 0`.
#[derive(Debug, Clone)]
pub struct EstimateSampler {
    d: f64,
    // Cholesky factor of the covariance.
    l11: f64,
    l21: f64,
    l22: f64,
}

impl EstimateSampler {
    pub fn new(d: f64, h_star: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!("sampling needs finite D > 0, got {d}")));
        }
        let design = standard_design()?;
        let info = design.j_star.scaled(d / h_star);
        let cov = info.inverse().ok_or(Error::InvalidMatrix { det: info.det() })?;
        let l11 = cov.j11.sqrt();
        let l21 = cov.j12 / l11;
        let l22 = (cov.j22 - l21 * l21).max(0.0).sqrt();
        Ok(EstimateSampler { d, l11, l21, l22 })
    }

    /// One draw, unconditioned (the slope may be non-positive).
    pub fn draw_raw(&self, rng: &mut Rng) -> ModelParams {
        let n1: f64 = rng.sample(StandardNormal);
        let n2: f64 = rng.sample(StandardNormal);
        ModelParams { a: 1.0 + self.l11 * n1, b: self.l21 * n1 + self.l22 * n2 }
    }

    /// One accepted draw and the number of rejections it took.
    pub fn draw(&self, rng: &mut Rng) -> Result<(ModelParams, usize)> {
        let mut rejected = 0;
        loop {
            let p = self.draw_raw(rng);
            if p.a > 0.0 {
                return Ok((p, rejected));
            }
            rejected += 1;
            // Past this point the acceptance rate is surely below one half.
            if rejected > 1000 {
                return Err(Error::ExcessiveRejection { d: self.d, rate: 1.0 });
            }
        }
    }
}

/// Standardized design points `((z1* - b) / a, (z2* - b) / a)` induced by an
/// estimate when the truth is `(1, 0)`.
pub fn induced_points(design: &StandardDesign, estimate: &ModelParams) -> (f64, f64) {
    (estimate.covariate_for(design.z1), estimate.covariate_for(design.z2))
}

/// `sqrt(g(z1) g(z2)) (z1 - z2)`: the D of one measurement pair at the
/// induced points, evaluated under the truth `(1, 0)`.
pub fn pair_gain(design: &StandardDesign, estimate: &ModelParams) -> f64 {
    let (z1, z2) = induced_points(design, estimate);
    (g_weight(z1) * g_weight(z2)).sqrt() * (z1 - z2)
}

/// Monte-Carlo mean of [`pair_gain`] under the sampling distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub rejected: usize,
}

/// Expected change in D from one pair of measurements at accumulated `d`.
pub fn estimate_expected_change(
    model: &AccumulationModel,
    d: f64,
    n_samples: usize,
    seed: u64,
) -> Result<GainEstimate> {
    if n_samples == 0 {
        return Err(invalid("n_samples must be at least 1"));
    }
    let design = standard_design()?;
    let sampler = EstimateSampler::new(d, model.h_star)?;
    let mut rng = replication_rng(seed, 0);
    let mut rejected = 0usize;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_samples {
        let (estimate, r) = sampler.draw(&mut rng)?;
        rejected += r;
        let gain = pair_gain(design, &estimate);
        sum += gain;
        sum_sq += gain * gain;
    }
    let rate = rejected as f64 / (rejected + n_samples) as f64;
    if rate > 0.5 {
        return Err(Error::ExcessiveRejection { d, rate });
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = if n_samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(GainEstimate { mean, std_error: (var / n).sqrt(), n_samples, rejected })
}

/// `|sqrt det(J_1 + .. + J_n) - sqrt det(J_1 + .. + J_{n-1}) - sqrt det(J_n)|`
/// for one sequence of per-round information matrices, `n = 2..=len`.
pub fn accumulation_discrepancies(rounds: &[InformationMatrix]) -> Vec<f64> {
    let root_det = |j: &InformationMatrix| j.det().max(0.0).sqrt();
    let mut total = rounds.first().copied().unwrap_or(InformationMatrix::ZERO);
    rounds
        .iter()
        .skip(1)
        .map(|j| {
            let before = root_det(&total);
            total += *j;
            (root_det(&total) - before - root_det(j)).abs()
        })
        .collect()
}

/// Mean accumulation discrepancy per round over `n_reps` replications.
///
/// Round `i` (1-based) draws its estimate from the sampler at accumulated
/// `D = d_start + (i - 1) h*`; its information matrix is that of one
/// measurement pair at the induced points under the truth `(1, 0)`.
/// Entry `k` of the result belongs to round `n = k + 2`.
pub fn accumulation_convergence_check(
    model: &AccumulationModel,
    n_max: usize,
    d_start: f64,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(invalid(format!("n_max must be at least 2, got {n_max}")));
    }
    if n_reps == 0 {
        return Err(invalid("n_reps must be at least 1"));
    }
    let design = standard_design()?;
    let samplers = (0..n_max)
        .map(|i| EstimateSampler::new(d_start + i as f64 * model.h_star, model.h_star))
        .collect::<Result<Vec<_>>>()?;
    let truth = ModelParams::standard();
    let mut means = vec![0.0; n_max - 1];
    let (mut rejected, mut accepted) = (0usize, 0usize);
    for rep in 0..n_reps {
        let mut rng = replication_rng(seed, rep as u64);
        let mut rounds = Vec::with_capacity(n_max);
        for sampler in &samplers {
            let (estimate, r) = sampler.draw(&mut rng)?;
            rejected += r;
            accepted += 1;
            let (z1, z2) = induced_points(design, &estimate);
            rounds.push(crate::cloglog::fisher_information(&truth, &[z1, z2]));
        }
        for (mean, disc) in means.iter_mut().zip(accumulation_discrepancies(&rounds)) {
            *mean += disc;
        }
    }
    let rate = rejected as f64 / (rejected + accepted) as f64;
    if rate > 0.5 {
        return Err(Error::ExcessiveRejection { d: d_start, rate });
    }
    for mean in &mut means {
        *mean /= n_reps as f64;
    }
    Ok(means)
}
