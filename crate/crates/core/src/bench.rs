//! Reproduction checks, one function per numbered benchmark criterion.
//!
//! Each check runs at its stated tolerance and reports the measured values,
//! whether it passed, and how long it took.

use std::time::{Duration, Instant};

use rand::{Rng as _, SeedableRng};

use crate::accumulation::{accumulation_convergence_check, AccumulationModel, DEFAULT_ETA, DEFAULT_H_STAR};
use crate::cloglog::solve_optimal_design;
use crate::cloglog::{d_criterion, fisher_information, ModelParams};
use crate::dpp::{
    brute_force_max_d, brute_force_min_time, extract_schedule_max_d, solve_max_d, solve_min_time, MaxDConfig,
    MinTimeConfig, ValueTableMaxD, DEFAULT_NODE_CAP,
};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sim::{benchmark_config, benchmark_schedule, run_replications, Policy, MAX_ESCALATIONS};
use crate::stats::{median, quantile, sign_test};

pub const PUBLISHED_Z1: f64 = 0.979_632_691_29;
pub const PUBLISHED_Z2: f64 = -1.337_736_677;
pub const PUBLISHED_D_STAR: f64 = 0.809_402_68;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(
    id: &'static str,
    title: &'static str,
    limit: Duration,
    check: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok((ok, detail)) if elapsed <= limit => (ok, detail),
        Ok((_, detail)) => (false, format!("{detail}; exceeded the {} s limit", limit.as_secs())),
        Err(err) => (false, format!("error: {err}")),
    };
    CriterionResult { id, title, passed, detail, elapsed }
}

/// Two-point design and its criterion value.
pub fn optimal_design() -> CriterionResult {
    timed("1", "optimal design", Duration::from_secs(1), || {
        let (z1, z2) = solve_optimal_design()?;
        let d = d_criterion(&fisher_information(&ModelParams::standard(), &[z1, z2]))?;
        let ok = (z1 - PUBLISHED_Z1).abs() < 1e-6 && (z2 - PUBLISHED_Z2).abs() < 1e-6 && (d - PUBLISHED_D_STAR).abs() < 1e-7;
        Ok((ok, format!("z* = ({z1:.11}, {z2:.10}), sqrt det J* = {d:.9}")))
    })
}

/// Limit and reference value of the accumulation model.
pub fn accumulation_parameters() -> CriterionResult {
    timed("2", "h(D) parameters", Duration::from_secs(1), || {
        let m = AccumulationModel::default();
        let far = m.h(1e12)?;
        let one = m.h(1.0)?;
        let expected = DEFAULT_H_STAR / (1.0 + DEFAULT_ETA.exp());
        let ok = (far - PUBLISHED_D_STAR).abs() < 1e-6 && (one - expected).abs() < 1e-10;
        Ok((ok, format!("h(1e12) = {far:.9}, h(1) = {one:.10} (direct {expected:.10})")))
    })
}

/// Random small max-D instance: `(T, Cs, D0, n_d)`.
pub fn random_max_d_instance(rng: &mut Rng) -> (u32, u32, f64, usize) {
    let cost = rng.random_range(1..=3);
    let horizon = rng.random_range(cost + 1..=40);
    (horizon, cost, rng.random_range(0.2..2.0), rng.random_range(5..=50))
}

/// Random small min-time instance: `(D0, D_final, Cs, n_d)`.
pub fn random_min_time_instance(rng: &mut Rng) -> (f64, f64, u32, usize) {
    let d0 = rng.random_range(1.5..4.0);
    (d0, d0 + rng.random_range(0.3..2.0), rng.random_range(1..=3), rng.random_range(5..=50))
}

/// Outcome of a solver-against-brute-force sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub checked: usize,
    pub mismatches: usize,
    /// Instances redrawn because exhaustive search exceeded the node cap.
    pub redrawn: usize,
}

/// Solver equals exhaustive search on `n` random max-D instances.
pub fn max_d_oracle_sweep(n: usize, seed: u64) -> Result<SweepReport> {
    let model = AccumulationModel::default();
    let mut rng = Rng::seed_from_u64(seed);
    let mut report = SweepReport { checked: 0, mismatches: 0, redrawn: 0 };
    while report.checked < n {
        let (horizon, cost, d0, n_d) = random_max_d_instance(&mut rng);
        let config = MaxDConfig::new(horizon, cost, d0, &model).with_grid_points(n_d);
        let grid = config.grid()?;
        let brute = match brute_force_max_d(horizon, cost, d0, &grid, &model, DEFAULT_NODE_CAP) {
            Err(Error::SearchTooLarge { .. }) => {
                report.redrawn += 1;
                continue;
            }
            other => other?,
        };
        let table = solve_max_d(&config, &model)?;
        let schedule = extract_schedule_max_d(&table, d0)?;
        if table.value(grid.nearest(d0), 0) != brute.value || schedule.update_times != brute.update_times {
            report.mismatches += 1;
        }
        report.checked += 1;
    }
    Ok(report)
}

/// Solver equals exhaustive search on `n` random min-time instances.
pub fn min_time_oracle_sweep(n: usize, seed: u64) -> Result<SweepReport> {
    let model = AccumulationModel::default();
    let mut rng = Rng::seed_from_u64(seed);
    let mut report = SweepReport { checked: 0, mismatches: 0, redrawn: 0 };
    while report.checked < n {
        let (d0, d_final, cost, n_d) = random_min_time_instance(&mut rng);
        let config = MinTimeConfig::new(d0, d_final, cost).with_grid_points(n_d);
        let grid = config.grid()?;
        let brute = match brute_force_min_time(d_final, cost, d0, &grid, &model, DEFAULT_NODE_CAP) {
            Err(Error::SearchTooLarge { .. }) => {
                report.redrawn += 1;
                continue;
            }
            other => other?,
        };
        let table = solve_min_time(&config, &model)?;
        let schedule = crate::dpp::extract_schedule_min_time(&table, d0)?;
        if table.value(grid.nearest(d0)) != brute.value || schedule.update_times != brute.update_times {
            report.mismatches += 1;
        }
        report.checked += 1;
    }
    Ok(report)
}

/// Grid solvers against exhaustive search on random small instances.
pub fn oracle_equality(seed: u64) -> CriterionResult {
    timed("3", "DP-oracle equality", Duration::from_secs(30), || {
        let max_d = max_d_oracle_sweep(50, seed)?;
        let min_time = min_time_oracle_sweep(50, seed.wrapping_add(1))?;
        let ok = max_d.mismatches == 0 && min_time.mismatches == 0;
        Ok((
            ok,
            format!(
                "max-D {}/{} equal ({} redrawn), min-time {}/{} equal ({} redrawn)",
                max_d.checked - max_d.mismatches,
                max_d.checked,
                max_d.redrawn,
                min_time.checked - min_time.mismatches,
                min_time.checked,
                min_time.redrawn
            ),
        ))
    })
}

/// Violations of `h(D)(T - t - Cs) <= u_Cs(D, t) <= u_0(D, t + Cs) + w(D)`,
/// where `w(D)` is the width of the grid cell around `D`, and of
/// `u <= h* (T - Cs)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SandwichReport {
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub bound_violations: usize,
    pub cells: usize,
}

pub fn sandwich_violations(with_cost: &ValueTableMaxD, without_cost: &ValueTableMaxD) -> SandwichReport {
    let model = with_cost.model();
    let grid = with_cost.grid();
    let horizon = with_cost.config().horizon;
    let cost = with_cost.config().update_cost;
    let bound = model.h_star * f64::from(horizon - cost);
    let mut report = SandwichReport::default();
    for i in 0..grid.len() {
        let d = grid.value(i);
        let below = if i > 0 { d - grid.value(i - 1) } else { 0.0 };
        let above = if i + 1 < grid.len() { grid.value(i + 1) - d } else { 0.0 };
        let slack = below.max(above);
        let h = model.h(d).unwrap_or(0.0);
        for t in 0..=horizon {
            let u = with_cost.value(i, t);
            report.cells += 1;
            if t + cost < horizon && h * f64::from(horizon - t - cost) > u {
                report.lower_violations += 1;
            }
            if t + cost <= horizon && u > without_cost.value(i, t + cost) + slack {
                report.upper_violations += 1;
            }
            if u > bound {
                report.bound_violations += 1;
            }
        }
    }
    report
}

/// Sandwich and boundedness at every grid point for `T = 1000`, `D0 = 0.5`.
pub fn sandwich_bound() -> CriterionResult {
    timed("4", "sandwich bound", Duration::from_secs(600), || {
        let model = AccumulationModel::default();
        let free = solve_max_d(&MaxDConfig::new(1000, 0, 0.5, &model), &model)?;
        let mut ok = true;
        let mut parts = Vec::new();
        for cost in [5, 30] {
            let table = solve_max_d(&MaxDConfig::new(1000, cost, 0.5, &model), &model)?;
            let r = sandwich_violations(&table, &free);
            ok &= r.lower_violations == 0 && r.upper_violations == 0 && r.bound_violations == 0;
            parts.push(format!(
                "Cs={cost}: {} cells, violations lower {} upper {} bound {}",
                r.cells, r.lower_violations, r.upper_violations, r.bound_violations
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Zero-cost max-D value against the continuous limit.
pub fn continuum_max_d() -> CriterionResult {
    timed("5a", "continuum consistency, max-D", Duration::from_secs(120), || {
        let model = AccumulationModel::default();
        let table = solve_max_d(&MaxDConfig::new(1000, 0, 0.5, &model).with_grid_points(4000), &model)?;
        let u = table.value(table.grid().nearest(0.5), 0);
        let exact = model.max_d_continuous(0.5, 0.0, 1000.0)?;
        let rel = (u - exact).abs() / exact;
        Ok((rel < 0.01, format!("u(0.5, 0) = {u:.4}, ODE {exact:.4}, relative error {rel:.2e} (tol 1e-2)")))
    })
}

/// Zero-cost min-time value against the closed form.
pub fn continuum_min_time() -> CriterionResult {
    timed("5b", "continuum consistency, min-time", Duration::from_secs(120), || {
        let model = AccumulationModel::default();
        let table = solve_min_time(&MinTimeConfig::new(0.5, 5.0, 0).with_grid_points(4000), &model)?;
        let v = table.value(0) as f64;
        let exact = model.min_time_closed_form(0.5, 5.0)?;
        let rel = (v - exact).abs() / exact;
        Ok((rel < 0.01, format!("v(0.5) = {v}, closed form {exact:.4}, relative error {rel:.2e} (tol 1e-2)")))
    })
}

fn update_count(horizon: u32, cost: u32, d0: f64, model: &AccumulationModel) -> Result<usize> {
    let table = solve_max_d(&MaxDConfig::new(horizon, cost, d0, model), model)?;
    Ok(extract_schedule_max_d(&table, d0)?.len())
}

/// Ordering of update counts across costs and starting criteria.
pub fn schedule_orderings() -> CriterionResult {
    timed("6", "schedule orderings", Duration::from_secs(600), || {
        let model = AccumulationModel::default();
        let cheap = update_count(1000, 5, 0.5, &model)?;
        let costly = update_count(1000, 30, 0.5, &model)?;
        let low = update_count(1000, 10, 0.5, &model)?;
        let high = update_count(1000, 10, 5.0, &model)?;
        Ok((
            costly < cheap && high <= low,
            format!("updates Cs=5: {cheap}, Cs=30: {costly}; Cs=10 D0=0.5: {low}, D0=5: {high}"),
        ))
    })
}

/// DPP schedule against 10% stage growth on paired seeds.
pub fn benchmark_dominance(n_reps: usize, seed: u64) -> CriterionResult {
    timed("7", "benchmark dominance", Duration::from_secs(600), || {
        let model = AccumulationModel::default();
        let schedule = benchmark_schedule(&model)?;
        let updates = schedule.update_times.clone();
        let (dpp, skipped) = run_replications(&benchmark_config(Policy::DppMaxD(schedule), n_reps, seed))?;
        let (adhoc, _) = run_replications(&benchmark_config(Policy::AdhocGrowth { rate: 0.10 }, n_reps, seed))?;
        let finals = |ts: &[crate::sim::Trajectory]| ts.iter().map(|t| t.final_observed_d()).collect::<Vec<_>>();
        let (a, b) = (finals(&dpp), finals(&adhoc));
        let test = sign_test(&a, &b);
        let (ma, mb) = (median(&a).unwrap_or(0.0), median(&b).unwrap_or(0.0));

        let d0: Vec<f64> = dpp.iter().map(|t| t.stages[0].observed_d).collect();
        let first_batch: Vec<f64> = dpp.iter().filter(|t| t.escalations == 0).map(|t| t.stages[0].observed_d).collect();
        let d0_first = median(&first_batch).unwrap_or(f64::NAN);
        let calibrated = (d0_first - 0.1408).abs() <= 0.03;
        Ok((
            ma > mb && test.p_value < 0.05 && calibrated,
            format!(
                "DPP updates at {updates:?}; median final D: DPP {ma:.1}, ad hoc {mb:.1}; sign test {}-{} (ties {}), p = {:.2e}; \
                 D0 median {:.4} (first-batch {d0_first:.4}, {} of {n_reps} without escalation, IQR {:.3}-{:.3}); \
                 {skipped} initializations failed after {MAX_ESCALATIONS} escalations and were replaced",
                test.wins,
                test.losses,
                test.ties,
                test.p_value,
                median(&d0).unwrap_or(f64::NAN),
                first_batch.len(),
                quantile(&d0, 0.25).unwrap_or(f64::NAN),
                quantile(&d0, 0.75).unwrap_or(f64::NAN),
            ),
        ))
    })
}

/// Accumulation discrepancy shrinks from early to late rounds.
pub fn accumulation_convergence(seed: u64) -> CriterionResult {
    timed("8", "accumulation convergence", Duration::from_secs(120), || {
        let model = AccumulationModel::default();
        let seq = accumulation_convergence_check(&model, 200, 1.0, 100, seed)?;
        // Entry k belongs to round k + 2.
        let early = seq[0..20].iter().sum::<f64>() / 20.0;
        let late = seq[179..199].iter().sum::<f64>() / 20.0;
        Ok((late < early, format!("mean discrepancy rounds 2-21: {early:.4e}, rounds 181-200: {late:.4e}")))
    })
}

pub const DEFAULT_SEED: u64 = 20240601;

/// The min-time grid solver moves in whole time units, so its value cannot
/// come within 1% of the continuous integral at the criterion's target.
pub const KNOWN_UNATTAINABLE: &[&str] = &["5b"];

/// Criteria 1 through 8 in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        optimal_design(),
        accumulation_parameters(),
        oracle_equality(seed),
        sandwich_bound(),
        continuum_max_d(),
        continuum_min_time(),
        schedule_orderings(),
        benchmark_dominance(100, seed),
        accumulation_convergence(seed),
    ]
}
