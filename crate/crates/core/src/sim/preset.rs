//! The switching-measurement benchmark: `(a, b) = (0.24, -61)`, `T = 3500`.

use super::{Policy, SimulationConfig};
use crate::accumulation::AccumulationModel;
use crate::cloglog::ModelParams;
use crate::dpp::{extract_schedule_max_d, solve_max_d, MaxDConfig, Schedule};
use crate::error::Result;

pub const BENCHMARK_TRUTH: ModelParams = ModelParams { a: 0.24, b: -61.0 };
pub const BENCHMARK_HORIZON: u64 = 3500;
/// Seconds per measurement and per covariate update in the original setup.
pub const MEASUREMENT_SECONDS: f64 = 0.00386;
pub const UPDATE_SECONDS: f64 = 0.88167;
/// `UPDATE_SECONDS / MEASUREMENT_SECONDS`, about 228.4, rounded to whole measurements.
pub const BENCHMARK_UPDATE_COST: u32 = 228;
/// Criterion after initialization that the schedule is solved for.
pub const BENCHMARK_D0: f64 = 0.1408;
pub const BENCHMARK_INIT_STAGE: usize = 100;

/// Slope of the initialization guess. Its design points nearly coincide, so
/// the first batch carries little information; the intercept keeps the
/// design centered where the true one is.
const GUESS_SLOPE: f64 = 435.0;
/// Midpoint of the true design, `((z1* + z2*) / 2 - b) / a`.
const TRUE_DESIGN_CENTER: f64 = 253.420_617;
const STANDARD_DESIGN_MIDPOINT: f64 = -0.179_051_993;

pub const BENCHMARK_INIT_GUESS: ModelParams =
    ModelParams { a: GUESS_SLOPE, b: STANDARD_DESIGN_MIDPOINT - GUESS_SLOPE * TRUE_DESIGN_CENTER };

/// Benchmark simulation with the given policy.
pub fn benchmark_config(policy: Policy, n_reps: usize, seed: u64) -> SimulationConfig {
    SimulationConfig {
        true_params: BENCHMARK_TRUTH,
        horizon: BENCHMARK_HORIZON,
        update_cost: BENCHMARK_UPDATE_COST,
        init_stage: BENCHMARK_INIT_STAGE,
        init_guess: BENCHMARK_INIT_GUESS,
        n_reps,
        seed,
        policy,
        observed_d_at_truth: false,
    }
}

/// Max-D schedule for the benchmark horizon from [`BENCHMARK_D0`].
pub fn benchmark_schedule(model: &AccumulationModel) -> Result<Schedule> {
    let config = MaxDConfig::new(BENCHMARK_HORIZON as u32, BENCHMARK_UPDATE_COST, BENCHMARK_D0, model);
    let table = solve_max_d(&config, model)?;
    extract_schedule_max_d(&table, BENCHMARK_D0)
}
