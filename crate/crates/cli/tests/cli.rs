use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cloglog-dpp")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap();
    line.split('=').nth(1).unwrap().trim().parse().unwrap()
}

fn schedule_times(path: &Path) -> Vec<u64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap()[1].parse().unwrap()).collect()
}

#[test]
fn design_for_standard_parameters() {
    let out = run(&["design", "--a", "1", "--b", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((value(&text, "z1") - 0.97963269129).abs() < 1e-6);
    assert!((value(&text, "z2") + 1.337736677).abs() < 1e-6);
    assert!((value(&text, "sqrt(det J)") - 0.80940268).abs() < 1e-7);
}

#[test]
fn design_rescales_covariates() {
    let out = run(&["design", "--a", "0.24", "--b", "-61"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((value(&text, "x1") - (0.97963269129 + 61.0) / 0.24).abs() < 1e-5);
    assert!((value(&text, "x2") - (-1.337736677 + 61.0) / 0.24).abs() < 1e-5);
}

#[test]
fn design_rejects_zero_slope() {
    assert_eq!(run(&["design", "--a", "0", "--b", "0"]).status.code(), Some(2));
    assert_eq!(run(&["design", "--a", "1"]).status.code(), Some(2));
}

#[test]
fn max_d_schedules_respect_update_cost() {
    let dir = tempfile::tempdir().unwrap();
    let (cheap, costly) = (dir.path().join("cheap"), dir.path().join("costly"));
    for (cs, out) in [("5", &cheap), ("30", &costly)] {
        let status = run(&["solve-max-d", "--t", "1000", "--cs", cs, "--d0", "0.5", "--out", out.to_str().unwrap()]).status;
        assert!(status.success());
    }
    let fine = schedule_times(&cheap.join("schedule.csv"));
    assert!(fine.windows(2).all(|w| w[1] - w[0] > 5), "{fine:?}");
    assert!(schedule_times(&costly.join("schedule.csv")).len() < fine.len());
    let table = fs::read_to_string(cheap.join("max_d_table.csv")).unwrap();
    assert!(table.starts_with("d_index,d,t,u,t_next\n"));
}

#[test]
fn max_d_rejects_cost_at_horizon() {
    assert_eq!(run(&["solve-max-d", "--t", "1000", "--cs", "1000", "--d0", "0.5"]).status.code(), Some(2));
}

#[test]
fn min_time_cost_exceeds_continuous_bound() {
    let out = run(&["solve-min-time", "--d0", "0.5", "--dfinal", "5", "--cs", "10"]);
    assert!(out.status.success());
    let first = stdout(&out).lines().next().unwrap().to_string();
    let v: f64 = first.split(") = ").nth(1).unwrap().split(';').next().unwrap().parse().unwrap();
    let bound: f64 = first.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(v >= bound, "{first}");
}

#[test]
fn min_time_at_or_past_target_is_free() {
    for d0 in ["5", "6"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&["solve-min-time", "--d0", d0, "--dfinal", "5", "--cs", "10", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success());
        assert!(stdout(&out).contains("total time 0"));
        assert!(schedule_times(&dir.path().join("schedule.csv")).is_empty());
    }
}

#[test]
fn grid_overflow_is_a_numerical_failure() {
    let out = run(&["solve-max-d", "--t", "100", "--cs", "5", "--d0", "0.5", "--d-max", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let args =
                ["simulate", "--policy", "adhoc-growth", "--t", "300", "--n-reps", "1", "--seed", "7", "--out", out.to_str().unwrap()];
            assert!(run(&args).status.success());
            (fs::read(out.join("trajectories.csv")).unwrap(), fs::read(out.join("summary.csv")).unwrap())
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn adhoc_stages_grow_ten_percent() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--policy", "adhoc-growth", "--rate", "0.10", "--t", "2000", "--cs", "0", "--n-reps", "1", "--out",
        dir.path().to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let mut reader = csv::Reader::from_path(dir.path().join("trajectories.csv")).unwrap();
    let sizes: Vec<f64> = reader.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    // Stage 0 is initialization; the last stage is cut to the budget.
    for w in sizes[..sizes.len() - 1].windows(2).skip(1) {
        assert_eq!(w[1], (w[0] * 1.1).round(), "{sizes:?}");
    }
}

#[test]
fn benchmark_preset_parameters() {
    let out = run(&["simulate", "--preset", "benchmark", "--policy", "adhoc-growth", "--n-reps", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("truth (a, b) = (0.24, -61), T = 3500, Cs = 228"), "{text}");
    assert!(text.contains("228.41"));
}

#[test]
fn config_file_flags_yield_to_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    fs::write(&file, "# small run\npolicy = fixed-batch\nbatch = 50\nt = 300\nn-reps = 3\n").unwrap();
    let out = run(&["simulate", "--config", file.to_str().unwrap(), "--n-reps", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("fixed-batch: 1 replications"));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    assert_eq!(run(&["simulate", "--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
}
