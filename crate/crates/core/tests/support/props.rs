//! Invariant checks shared by the property suites and the acceptance run.
//!
//! Each check takes already-drawn inputs and fails with a `TestCaseError`.

#![allow(dead_code)]

use cloglog_dpp::accumulation::AccumulationModel;
use cloglog_dpp::cloglog::{
    fisher_information, fit_mle, g_weight, has_finite_mle, optimal_covariates, prob_response, score_and_information,
    standard_design, ModelParams, Observation,
};
use cloglog_dpp::dpp::{
    accumulated_gain, brute_force_max_d, brute_force_min_time, extract_schedule_max_d, extract_schedule_min_time,
    solve_max_d, solve_min_time, MaxDConfig, MinTimeConfig, DEFAULT_NODE_CAP,
};
use cloglog_dpp::rng::replication_rng;
use cloglog_dpp::sim::{run_policy, Policy, SimulationConfig};
use cloglog_dpp::Error;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn prob_increasing(a: f64, b: f64, z: f64, dz: f64, db: f64) -> Check {
    let p = ModelParams::new(a, b).unwrap();
    let x = p.covariate_for(z);
    let x2 = p.covariate_for(z + dz);
    prop_assert!(prob_response(&p, x) < prob_response(&p, x2), "not increasing in x at z = {z}");
    let shifted = ModelParams::new(a, b + db).unwrap();
    prop_assert!(prob_response(&p, x) < prob_response(&shifted, x), "not increasing in b at z = {z}");
    Ok(())
}

pub fn det_matches_pairwise_sum(params: (f64, f64), xs: &[f64]) -> Check {
    let p = ModelParams::new(params.0, params.1).unwrap();
    let det = fisher_information(&p, xs).det();
    let g: Vec<f64> = xs.iter().map(|&x| g_weight(p.linear_predictor(x))).collect();
    let mut pairwise = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            pairwise += g[i] * g[j] * (xs[i] - xs[j]).powi(2);
        }
    }
    let j = fisher_information(&p, xs);
    let scale = (j.j11 * j.j22).abs();
    prop_assert!((det - pairwise).abs() <= 1e-10 * scale.max(pairwise), "det {det} vs pairwise {pairwise}");
    Ok(())
}

pub fn scale_equivariance(a: f64, b: f64) -> Check {
    let p = ModelParams::new(a, b).unwrap();
    let design = optimal_covariates(&p).unwrap();
    let scaled = fisher_information(&p, &[design.x1, design.x2]).det();
    let standard = standard_design().unwrap().j_star.det();
    prop_assert!(rel(scaled, standard / (a * a)) < 1e-10, "{scaled} vs {}", standard / (a * a));
    Ok(())
}

pub fn mle_is_stationary(truth: (f64, f64), xs: &[f64], n: usize, seed: u64) -> Check {
    let truth = ModelParams::new(truth.0, truth.1).unwrap();
    let mut rng = replication_rng(seed, 0);
    let data: Vec<Observation> = (0..n)
        .map(|i| {
            let x = xs[i % xs.len()];
            Observation::new(x, cloglog_dpp::sim::simulate_response(&truth, x, &mut rng))
        })
        .collect();
    prop_assume!(has_finite_mle(&data));
    match fit_mle(&data, &truth) {
        Ok(fit) => {
            let (score, info) = score_and_information(&fit, &data);
            let det = info.det();
            let decrement = (info.j22 * score[0] * score[0] - 2.0 * info.j12 * score[0] * score[1]
                + info.j11 * score[1] * score[1])
                / det;
            prop_assert!(decrement < 1e-10, "Newton decrement {decrement} (score {score:?}) at {fit:?}");
            prop_assert!(info.j11 > 0.0 && info.det() > 0.0, "information not positive definite");
        }
        Err(Error::NonPositiveSlope(_)) => prop_assume!(false),
        Err(err) => prop_assert!(false, "fit failed: {err}"),
    }
    Ok(())
}

pub fn g_positive(z: f64) -> Check {
    prop_assert!(g_weight(z) > 0.0, "g({z}) = {}", g_weight(z));
    Ok(())
}

pub fn h_increasing_and_bounded(d: f64, factor: f64) -> Check {
    let m = AccumulationModel::default();
    let (h1, h2) = (m.h(d).unwrap(), m.h(d * factor).unwrap());
    prop_assert!(h1 < h2, "h({d}) = {h1} >= h({}) = {h2}", d * factor);
    prop_assert!(0.0 < h1 && h2 < m.h_star);
    Ok(())
}

pub fn closed_form_decreasing_and_additive(d: f64, mid: f64, end: f64) -> Check {
    let m = AccumulationModel::default();
    let whole = m.min_time_closed_form(d, end).unwrap();
    let later = m.min_time_closed_form(mid, end).unwrap();
    prop_assert!(later < whole);
    let split = m.min_time_closed_form(d, mid).unwrap() + later;
    prop_assert!(rel(split, whole) < 1e-10);
    Ok(())
}

pub fn continuous_monotone_and_flow(d: f64, t: f64, horizon: f64, extra: f64) -> Check {
    let m = AccumulationModel::default();
    let base = m.max_d_continuous(d, t, horizon).unwrap();
    prop_assert!(m.max_d_continuous(d, 0.5 * (t + horizon), horizon).unwrap() <= base);
    let longer = m.max_d_continuous(d, t, horizon + extra).unwrap();
    prop_assert!(longer >= base);
    let continued = m.max_d_continuous(d + base, horizon, horizon + extra).unwrap();
    prop_assert!(rel(d + base + continued, d + longer) < 1e-6, "{} vs {}", d + base + continued, d + longer);
    Ok(())
}

pub fn max_d_table_invariants(horizon: u32, cost: u32, d0: f64, n_d: usize) -> Check {
    let m = AccumulationModel::default();
    let table = solve_max_d(&MaxDConfig::new(horizon, cost, d0, &m).with_grid_points(n_d), &m).unwrap();
    let free = solve_max_d(&MaxDConfig::new(horizon, 0, d0, &m).with_grid_points(n_d), &m).unwrap();
    let grid = table.grid();
    let bound = m.h_star * f64::from(horizon - cost);
    for i in 0..grid.len() {
        let d = grid.value(i);
        let width = (if i > 0 { d - grid.value(i - 1) } else { 0.0 }).max(if i + 1 < grid.len() {
            grid.value(i + 1) - d
        } else {
            0.0
        });
        for t in 0..=horizon {
            let u = table.value(i, t);
            prop_assert!((0.0..=bound).contains(&u), "u out of [0, h*(T-Cs)] at ({i}, {t})");
            if t > 0 {
                prop_assert!(u <= table.value(i, t - 1), "u increases in t at ({i}, {t})");
            }
            if i > 0 {
                prop_assert!(u >= table.value(i - 1, t), "u decreases in D at ({i}, {t})");
            }
            match table.next_update(i, t) {
                None => prop_assert!(t + cost >= horizon && u == 0.0),
                Some(next) => {
                    prop_assert!(t + cost < next && next <= horizon);
                    prop_assert!(m.h(d).unwrap() * f64::from(horizon - t - cost) <= u);
                }
            }
            if t + cost <= horizon {
                prop_assert!(u <= free.value(i, t + cost) + width, "sandwich upper bound at ({i}, {t})");
            }
        }
    }
    Ok(())
}

pub fn max_d_schedule_invariants(horizon: u32, cost: u32, d0: f64, n_d: usize) -> Check {
    let m = AccumulationModel::default();
    let table = solve_max_d(&MaxDConfig::new(horizon, cost, d0, &m).with_grid_points(n_d), &m).unwrap();
    let s = extract_schedule_max_d(&table, d0).unwrap();
    prop_assert_eq!(s.update_times[0], 0);
    prop_assert!(s.update_times.windows(2).all(|w| w[1] > w[0] + u64::from(cost)));
    prop_assert!(*s.update_times.last().unwrap() + u64::from(cost) < u64::from(horizon));
    let productive: u64 = s.stage_lengths().iter().map(|g| g - u64::from(cost)).sum();
    prop_assert!(productive <= u64::from(horizon));
    Ok(())
}

/// Moving any one update time by one changes the exact-dynamics gain by at
/// most `h*` for each of the two stages it borders.
pub fn schedule_stability(horizon: u32, cost: u32, d0: f64) -> Check {
    let m = AccumulationModel::default();
    let table = solve_max_d(&MaxDConfig::new(horizon, cost, d0, &m).with_grid_points(400), &m).unwrap();
    let s = extract_schedule_max_d(&table, d0).unwrap();
    let (h, c) = (u64::from(horizon), cost);
    let base = accumulated_gain(&m, d0, &s.update_times, h, c).unwrap();
    for k in 1..s.update_times.len() {
        for delta in [-1i64, 1] {
            let mut times = s.update_times.clone();
            times[k] = (times[k] as i64 + delta) as u64;
            if let Ok(gain) = accumulated_gain(&m, d0, &times, h, c) {
                prop_assert!((gain - base).abs() <= 2.0 * m.h_star, "update {k} moved by {delta}: {gain} vs {base}");
            }
        }
    }
    Ok(())
}

pub fn max_d_matches_brute_force(horizon: u32, cost: u32, d0: f64, n_d: usize) -> Check {
    let m = AccumulationModel::default();
    let config = MaxDConfig::new(horizon, cost, d0, &m).with_grid_points(n_d);
    let grid = config.grid().unwrap();
    let brute = match brute_force_max_d(horizon, cost, d0, &grid, &m, DEFAULT_NODE_CAP) {
        Err(Error::SearchTooLarge { .. }) => return Err(TestCaseError::reject("search too large")),
        other => other.unwrap(),
    };
    let table = solve_max_d(&config, &m).unwrap();
    prop_assert_eq!(table.value(grid.nearest(d0), 0), brute.value);
    prop_assert_eq!(extract_schedule_max_d(&table, d0).unwrap().update_times, brute.update_times);
    Ok(())
}

pub fn min_time_invariants(d0: f64, d_final: f64, cost: u32, n_d: usize) -> Check {
    let m = AccumulationModel::default();
    let table = solve_min_time(&MinTimeConfig::new(d0, d_final, cost).with_grid_points(n_d), &m).unwrap();
    let dearer = solve_min_time(&MinTimeConfig::new(d0, d_final, cost + 1).with_grid_points(n_d), &m).unwrap();
    let grid = table.grid();
    for i in 0..grid.len() {
        let d = grid.value(i);
        let v = table.value(i);
        if d >= d_final {
            prop_assert_eq!(v, 0);
            continue;
        }
        let single = u64::from(cost) + ((d_final - d) / m.h(d).unwrap()).ceil() as u64;
        prop_assert!(v <= single, "v = {v} above one-stage cost {single} at {i}");
        prop_assert!(table.stage_length(i).unwrap() > u64::from(cost));
        prop_assert!(v <= table.value(i.saturating_sub(1)), "v increases in D at {i}");
        prop_assert!(dearer.value(i) >= v, "raising Cs lowered v at {i}");
    }
    let s = extract_schedule_min_time(&table, d0).unwrap();
    prop_assert_eq!(s.total_cost, Some(table.value(grid.nearest(d0))));
    prop_assert!(s.update_times.windows(2).all(|w| w[1] > w[0] + u64::from(cost)));
    Ok(())
}

pub fn min_time_matches_brute_force(d0: f64, d_final: f64, cost: u32, n_d: usize) -> Check {
    let m = AccumulationModel::default();
    let config = MinTimeConfig::new(d0, d_final, cost).with_grid_points(n_d);
    let grid = config.grid().unwrap();
    let brute = match brute_force_min_time(d_final, cost, d0, &grid, &m, DEFAULT_NODE_CAP) {
        Err(Error::SearchTooLarge { .. }) => return Err(TestCaseError::reject("search too large")),
        other => other.unwrap(),
    };
    let table = solve_min_time(&config, &m).unwrap();
    prop_assert_eq!(table.value(grid.nearest(d0)), brute.value);
    prop_assert_eq!(extract_schedule_min_time(&table, d0).unwrap().update_times, brute.update_times);
    Ok(())
}

pub fn small_simulation(policy: Policy, seed: u64, at_truth: bool) -> SimulationConfig {
    SimulationConfig {
        true_params: ModelParams::standard(),
        horizon: 240,
        update_cost: 8,
        init_stage: 40,
        init_guess: ModelParams::new(1.3, 0.2).unwrap(),
        n_reps: 1,
        seed,
        policy,
        observed_d_at_truth: at_truth,
    }
}

pub fn trajectory_invariants(rate: f64, seed: u64, stream: u64) -> Check {
    let config = small_simulation(Policy::AdhocGrowth { rate }, seed, true);
    let first = run_policy(&config, &mut replication_rng(seed, stream));
    let second = run_policy(&config, &mut replication_rng(seed, stream));
    prop_assert_eq!(&first, &second);
    let Ok(t) = first else { return Err(TestCaseError::reject("initialization failed")) };
    let measured: u64 = t.stages.iter().map(|s| s.n_measurements).sum();
    prop_assert_eq!(t.total_time, measured + u64::from(config.update_cost) * t.updates() as u64);
    prop_assert!(t.total_time - t.stages[0].n_measurements <= config.horizon);
    for w in t.stages.windows(2) {
        prop_assert!(w[1].observed_d >= w[0].observed_d, "observed D decreased at fixed parameters");
        prop_assert!(w[1].cumulative_time > w[0].cumulative_time);
    }
    Ok(())
}

fn run<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let config = proptest::test_runner::Config {
        cases,
        max_global_rejects: 100 * cases,
        failure_persistence: None,
        ..Default::default()
    };
    proptest::test_runner::TestRunner::new(config).run(&strategy, check).map_err(|e| e.to_string())
}

/// A named invariant checked over `cases` random inputs.
pub struct Suite {
    pub name: &'static str,
    pub run: fn(u32) -> Result<(), String>,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "prob_response increasing in x and b",
        run: |n| {
            run(n, (0.05..5.0f64, -5.0..5.0f64, -30.0..3.0f64, 1e-6..1.0f64, 1e-6..1.0f64), |(a, b, z, dz, db)| {
                prob_increasing(a, b, z, dz, a * db)
            })
        },
    },
    Suite {
        name: "det J equals the pairwise sum",
        run: |n| {
            run(n, ((0.2..3.0f64, -2.0..2.0f64), prop::collection::vec(-3.0..3.0f64, 2..=20)), |(p, xs)| {
                det_matches_pairwise_sum(p, &xs)
            })
        },
    },
    Suite {
        name: "det J scales with a^-2",
        run: |n| run(n, (0.01..50.0f64, -100.0..100.0f64), |(a, b)| scale_equivariance(a, b)),
    },
    Suite {
        name: "MLE is stationary with positive definite information",
        run: |n| {
            run(n, ((0.5..2.0f64, -1.0..1.0f64), prop::collection::vec(-2.5..1.5f64, 2..=5), 50..400usize, any::<u64>()), |(t, xs, k, s)| {
                mle_is_stationary(t, &xs, k, s)
            })
        },
    },
    Suite { name: "g is positive", run: |n| run(n, -700.0..6.5f64, g_positive) },
    Suite {
        name: "h increasing and below h*",
        run: |n| run(n, (-3.0..6.0f64, 1.01..2.0f64), |(e, f)| h_increasing_and_bounded(10f64.powf(e), f)),
    },
    Suite {
        name: "continuous min time decreasing and additive",
        run: |n| {
            run(n, (0.01..10.0f64, 0.01..1.0f64, 0.01..10.0f64), |(d, a, b)| {
                closed_form_decreasing_and_additive(d, d + a, d + a + b)
            })
        },
    },
    Suite {
        name: "continuous max D monotone with flow property",
        run: |n| {
            run(n, (0.05..10.0f64, 0.0..0.9f64, 10.0..500.0f64, 1.0..300.0f64), |(d, f, h, e)| {
                continuous_monotone_and_flow(d, f * h, h, e)
            })
        },
    },
    Suite {
        name: "max-D table invariants and sandwich bound",
        run: |n| {
            run(n, (2u32..=80, 0.05..5.0f64, 2usize..=60, 0.0..1.0f64), |(h, d, k, c)| {
                let cost = ((c * f64::from(h.min(12))) as u32).min(h - 1);
                max_d_table_invariants(h, cost, d, k)
            })
        },
    },
    Suite {
        name: "max-D schedule invariants",
        run: |n| {
            run(n, (2u32..=300, 0.05..5.0f64, 2usize..=200, 0.0..1.0f64), |(h, d, k, c)| {
                let cost = ((c * f64::from(h.min(40))) as u32).min(h - 1);
                max_d_schedule_invariants(h, cost, d, k)
            })
        },
    },
    Suite {
        name: "max-D schedule stable under one-step perturbation",
        run: |n| run(n, (50u32..=400, 1u32..=30, 0.1..5.0f64), |(h, c, d)| schedule_stability(h, c.min(h - 1), d)),
    },
    Suite {
        name: "max-D solver equals exhaustive search",
        run: |n| {
            run(n, (1u32..=3, 0u32..=37, 0.2..2.0f64, 5usize..=50), |(c, extra, d, k)| {
                max_d_matches_brute_force(c + 1 + extra, c, d, k)
            })
        },
    },
    Suite {
        name: "min-time table invariants",
        run: |n| {
            run(n, (0.2..4.0f64, 0.1..3.0f64, 1u32..=10, 2usize..=80), |(d, gap, c, k)| {
                min_time_invariants(d, d + gap, c, k)
            })
        },
    },
    Suite {
        name: "min-time solver equals exhaustive search",
        run: |n| {
            run(n, (1.5..4.0f64, 0.3..2.0f64, 1u32..=3, 5usize..=50), |(d, gap, c, k)| {
                min_time_matches_brute_force(d, d + gap, c, k)
            })
        },
    },
    Suite {
        name: "trajectories deterministic, time accounted, D nondecreasing",
        run: |n| run(n, (0.0..0.5f64, any::<u64>(), 0u64..1000), |(r, s, k)| trajectory_invariants(r, s, k)),
    },
];

pub fn suite(name: &str) -> &'static Suite {
    SUITES.iter().find(|s| s.name == name).expect("unknown suite")
}
