use cloglog_dpp::accumulation::AccumulationModel;
use cloglog_dpp::rng::replication_rng;
use cloglog_dpp::sim::{aggregate, run_replications, simulate_response, Policy, SimulationConfig};
use cloglog_dpp::stats::median;
use cloglog_dpp::ModelParams;

fn config(policy: Policy, guess: ModelParams, n_reps: usize) -> SimulationConfig {
    SimulationConfig {
        true_params: ModelParams::standard(),
        horizon: 400,
        update_cost: 0,
        init_stage: 100,
        init_guess: guess,
        n_reps,
        seed: 99,
        policy,
        observed_d_at_truth: false,
    }
}

#[test]
fn response_frequency_at_zero_predictor() {
    let p = ModelParams::standard();
    let mut rng = replication_rng(5, 0);
    let n = 100_000;
    let hits = (0..n).filter(|_| simulate_response(&p, 0.0, &mut rng)).count();
    let expected = 1.0 - (-1.0f64).exp();
    assert!((hits as f64 / n as f64 - expected).abs() < 0.005);
}

#[test]
fn well_initialized_start_follows_accumulation() {
    let m = AccumulationModel::default();
    let (trajectories, _) = run_replications(&config(Policy::FixedBatch { size: 2 }, ModelParams::standard(), 200)).unwrap();
    let d0: Vec<f64> = trajectories.iter().map(|t| t.stages[0].observed_d).collect();
    // The guess is the truth, so every pair sits on the optimal design and
    // adds h* rather than h(D).
    let predicted = 50.0 * m.h_star;
    let observed = median(&d0).unwrap();
    assert!((observed - predicted).abs() / predicted < 0.3, "{observed} vs {predicted}");
}

#[test]
fn bad_guess_lowers_initial_criterion() {
    let bad = ModelParams::new(8.0, 0.3).unwrap();
    let run = |guess| {
        let (ts, _) = run_replications(&config(Policy::FixedBatch { size: 400 }, guess, 60)).unwrap();
        median(&ts.iter().map(|t| t.stages[0].observed_d).collect::<Vec<_>>()).unwrap()
    };
    let (good, poor) = (run(ModelParams::standard()), run(bad));
    assert!(poor < good, "{poor} vs {good}");
}

#[test]
fn pair_batches_gain_about_h_per_pair() {
    let m = AccumulationModel::default();
    let (ts, _) = run_replications(&config(Policy::FixedBatch { size: 2 }, ModelParams::standard(), 100)).unwrap();
    let mut ratios = Vec::new();
    for t in &ts {
        let (mut gain, mut predicted) = (0.0, 0.0);
        for w in t.stages.windows(2) {
            gain += w[1].observed_d - w[0].observed_d;
            predicted += m.h(w[0].observed_d).unwrap();
        }
        ratios.push(gain / predicted);
    }
    let ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((ratio - 1.0).abs() < 0.2, "mean gain ratio {ratio}");
}

#[test]
fn median_curve_increases() {
    let mut c = config(Policy::AdhocGrowth { rate: 0.1 }, ModelParams::standard(), 100);
    c.update_cost = 10;
    let (ts, _) = run_replications(&c).unwrap();
    let rows = aggregate(&ts);
    assert!(rows.windows(2).all(|w| w[1].median_d >= w[0].median_d));
}
