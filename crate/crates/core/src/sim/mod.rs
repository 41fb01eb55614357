//! Monte-Carlo simulation of the batch-sequential switching experiment.
//!
//! A replication starts with an initialization batch at covariates chosen
//! from a guess, then proceeds in stages. Each stage begins with an update
//! of cost `Cs`: the covariates move to the two-point design of the current
//! estimate, the stage's measurements are taken in alternating pairs, and
//! the estimate is refitted on all data. The horizon counts time after
//! initialization.

mod aggregate;
mod io;
mod preset;

pub use aggregate::{aggregate, SummaryRow};
pub use io::{write_summary, write_trajectories};
pub use preset::{
    benchmark_config, benchmark_schedule, BENCHMARK_D0, BENCHMARK_HORIZON, BENCHMARK_INIT_GUESS, BENCHMARK_TRUTH,
    BENCHMARK_UPDATE_COST, MEASUREMENT_SECONDS, UPDATE_SECONDS,
};

use rand::Rng as _;
use rayon::prelude::*;

use crate::cloglog::{d_criterion, fisher_information, fit_mle, optimal_covariates, prob_response};
use crate::cloglog::{ModelParams, Observation, TwoPointDesign};
use crate::dpp::Schedule;
use crate::error::{invalid, Error, Result};
use crate::rng::{replication_rng, Rng};

/// Escalations of the initialization batch before giving up.
pub const MAX_ESCALATIONS: usize = 5;
/// Extra replication streams tried per requested replication when
/// initialization keeps failing.
const MAX_STREAMS_PER_REP: u64 = 20;

/// When covariates are updated after initialization.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// Precomputed max-D schedule; its end time must equal the horizon.
    DppMaxD(Schedule),
    /// Precomputed min-time schedule; runs to completion.
    DppMinTime(Schedule),
    /// Stage sizes `round(previous * (1 + rate))`, starting from the
    /// initialization batch size.
    AdhocGrowth { rate: f64 },
    FixedBatch { size: u64 },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::DppMaxD(_) => "dpp-max-d",
            Policy::DppMinTime(_) => "dpp-min-time",
            Policy::AdhocGrowth { .. } => "adhoc-growth",
            Policy::FixedBatch { .. } => "fixed-batch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub true_params: ModelParams,
    /// Time budget after initialization, in measurements.
    pub horizon: u64,
    pub update_cost: u32,
    pub init_stage: usize,
    pub init_guess: ModelParams,
    pub n_reps: usize,
    pub seed: u64,
    pub policy: Policy,
    /// Evaluate the observed D at the true parameters instead of the MLE.
    pub observed_d_at_truth: bool,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_reps == 0 {
            return Err(invalid("n_reps must be at least 1"));
        }
        if self.init_stage < 2 {
            return Err(invalid(format!("init_stage must be at least 2, got {}", self.init_stage)));
        }
        match &self.policy {
            Policy::DppMaxD(schedule) => {
                if schedule.end_time != self.horizon || schedule.update_cost != self.update_cost {
                    return Err(invalid(format!(
                        "schedule was solved for T = {}, Cs = {}, not T = {}, Cs = {}",
                        schedule.end_time, schedule.update_cost, self.horizon, self.update_cost
                    )));
                }
            }
            Policy::DppMinTime(schedule) => {
                if schedule.update_cost != self.update_cost {
                    return Err(invalid("schedule was solved for a different update cost"));
                }
            }
            Policy::AdhocGrowth { rate } => {
                if !(*rate >= 0.0 && rate.is_finite()) {
                    return Err(invalid(format!("growth rate must be nonnegative, got {rate}")));
                }
            }
            Policy::FixedBatch { size } => {
                if *size == 0 {
                    return Err(invalid("batch size must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Measurements per post-initialization stage.
    pub fn stage_sizes(&self) -> Vec<u64> {
        let cost = u64::from(self.update_cost);
        match &self.policy {
            Policy::DppMaxD(s) | Policy::DppMinTime(s) => s.stage_lengths().iter().map(|l| l - cost).collect(),
            Policy::AdhocGrowth { rate } => {
                let mut prev = self.init_stage as f64;
                self.fill_budget(|| {
                    prev = (prev * (1.0 + rate)).round().max(1.0);
                    prev as u64
                })
            }
            Policy::FixedBatch { size } => self.fill_budget(|| *size),
        }
    }

    /// Stages from `next` until the horizon; the last one is cut to fit.
    fn fill_budget(&self, mut next: impl FnMut() -> u64) -> Vec<u64> {
        let cost = u64::from(self.update_cost);
        let mut used = 0;
        let mut sizes = Vec::new();
        while used + cost < self.horizon {
            let n = next().min(self.horizon - used - cost);
            sizes.push(n);
            used += cost + n;
        }
        sizes
    }
}

/// One stage of a trajectory; stage 0 is the initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub start_time: u64,
    pub n_measurements: u64,
    pub covariates: (f64, f64),
    /// `None` when the refit failed and the previous estimate was kept.
    pub mle_after: Option<ModelParams>,
    pub observed_d: f64,
    /// Clock at the end of the stage, initialization included.
    pub cumulative_time: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub stages: Vec<StageRecord>,
    pub total_time: u64,
    pub replication_id: usize,
    /// Stream of the replication RNG that produced this trajectory.
    pub stream_used: u64,
    pub seed: u64,
    pub escalations: usize,
}

impl Trajectory {
    pub fn final_observed_d(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.observed_d)
    }

    pub fn updates(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }
}

/// Bernoulli response at `x` under `params`.
pub fn simulate_response(params: &ModelParams, x: f64, rng: &mut Rng) -> bool {
    rng.random::<f64>() < prob_response(params, x)
}

/// `sqrt det J` at `estimate` over the covariates in `data`.
pub fn observed_d(data: &[Observation], estimate: &ModelParams) -> Result<f64> {
    let xs: Vec<f64> = data.iter().map(|o| o.x).collect();
    d_criterion(&fisher_information(estimate, &xs))
}

fn measure(params: &ModelParams, design: &TwoPointDesign, n: u64, rng: &mut Rng, data: &mut Vec<Observation>) {
    for j in 0..n {
        let x = if j % 2 == 0 { design.x1 } else { design.x2 };
        data.push(Observation::new(x, simulate_response(params, x, rng)));
    }
}

/// Result of the initialization phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Initialization {
    pub data: Vec<Observation>,
    pub estimate: ModelParams,
    pub observed_d: f64,
    pub escalations: usize,
    /// Covariates of the last batch.
    pub covariates: (f64, f64),
}

/// Initial batches at the design of `init_guess`, spread doubled around its
/// center after every batch that gives no usable fit.
pub fn initialize(config: &SimulationConfig, rng: &mut Rng) -> Result<Initialization> {
    config.validate()?;
    let guess = optimal_covariates(&config.init_guess)?;
    let center = 0.5 * (guess.x1 + guess.x2);
    let half = 0.5 * (guess.x1 - guess.x2);
    let mut data = Vec::new();
    for escalation in 0..=MAX_ESCALATIONS {
        let spread = half * f64::from(1u32 << escalation);
        let design = TwoPointDesign { x1: center + spread, x2: center - spread, ..guess };
        measure(&config.true_params, &design, config.init_stage as u64, rng, &mut data);
        if let Ok(estimate) = fit_mle(&data, &config.init_guess) {
            let at = if config.observed_d_at_truth { config.true_params } else { estimate };
            return Ok(Initialization {
                observed_d: observed_d(&data, &at)?,
                data,
                estimate,
                escalations: escalation,
                covariates: (design.x1, design.x2),
            });
        }
    }
    Err(Error::InitializationFailed(MAX_ESCALATIONS))
}

/// One replication: initialization followed by the policy's stages.
pub fn run_policy(config: &SimulationConfig, rng: &mut Rng) -> Result<Trajectory> {
    let init = initialize(config, rng)?;
    let mut data = init.data;
    let mut estimate = init.estimate;
    let mut clock = data.len() as u64;
    let mut stages = vec![StageRecord {
        start_time: 0,
        n_measurements: clock,
        covariates: init.covariates,
        mle_after: Some(estimate),
        observed_d: init.observed_d,
        cumulative_time: clock,
    }];

    for n in config.stage_sizes() {
        let start_time = clock;
        let design = optimal_covariates(&estimate)?;
        measure(&config.true_params, &design, n, rng, &mut data);
        clock += u64::from(config.update_cost) + n;
        let refit = fit_mle(&data, &estimate);
        if let Ok(fit) = refit {
            estimate = fit;
        }
        let at = if config.observed_d_at_truth { config.true_params } else { estimate };
        stages.push(StageRecord {
            start_time,
            n_measurements: n,
            covariates: (design.x1, design.x2),
            mle_after: refit.ok(),
            observed_d: observed_d(&data, &at)?,
            cumulative_time: clock,
        });
    }

    let total_time =
        stages.iter().map(|s| s.n_measurements).sum::<u64>() + u64::from(config.update_cost) * (stages.len() as u64 - 1);
    Ok(Trajectory { stages, total_time, replication_id: 0, stream_used: 0, seed: config.seed, escalations: init.escalations })
}

/// Replications in parallel with per-replication RNG streams.
///
/// Replication `r` uses stream `r`; streams whose initialization fails are
/// skipped and further streams are drawn in order until `n_reps`
/// trajectories succeed, so two policies run with the same seed see the
/// same initializations. Returns the trajectories and the number of
/// skipped streams.
pub fn run_replications(config: &SimulationConfig) -> Result<(Vec<Trajectory>, usize)> {
    config.validate()?;
    let n_reps = config.n_reps as u64;
    let mut trajectories = Vec::with_capacity(config.n_reps);
    let mut skipped = 0;
    let mut next_stream = 0u64;
    while trajectories.len() < config.n_reps {
        let wanted = (config.n_reps - trajectories.len()) as u64;
        if next_stream + wanted > n_reps * MAX_STREAMS_PER_REP {
            return Err(Error::InitializationFailed(MAX_ESCALATIONS));
        }
        let batch: Vec<(u64, Result<Trajectory>)> = (next_stream..next_stream + wanted)
            .into_par_iter()
            .map(|stream| (stream, run_policy(config, &mut replication_rng(config.seed, stream))))
            .collect();
        next_stream += wanted;
        for (stream, result) in batch {
            match result {
                Ok(mut trajectory) => {
                    trajectory.replication_id = trajectories.len();
                    trajectory.stream_used = stream;
                    trajectories.push(trajectory);
                }
                Err(Error::InitializationFailed(_)) => skipped += 1,
                Err(err) => return Err(err),
            }
        }
    }
    Ok((trajectories, skipped))
}
