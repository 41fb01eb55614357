mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cloglog_dpp::accumulation::AccumulationModel;
use cloglog_dpp::bench::{self, KNOWN_UNATTAINABLE};
use cloglog_dpp::cloglog::{d_criterion, fisher_information, optimal_covariates};
use cloglog_dpp::dpp::{
    extract_schedule_max_d, extract_schedule_min_time, solve_max_d, solve_min_time, write_max_d_table,
    write_min_time_table, write_schedule, GridSpacing, MaxDConfig, MinTimeConfig, Schedule, DEFAULT_GRID_POINTS,
};
use cloglog_dpp::sim::{
    aggregate, benchmark_config, benchmark_schedule, run_replications, write_summary, write_trajectories, Policy,
    SimulationConfig, BENCHMARK_D0, BENCHMARK_UPDATE_COST, MEASUREMENT_SECONDS, UPDATE_SECONDS,
};
use cloglog_dpp::stats::median;
use cloglog_dpp::{Error, ModelParams};

const SUBCOMMANDS: &[&str] = &["design", "solve-max-d", "solve-min-time", "simulate", "bench"];

#[derive(Parser, Debug)]
#[command(name = "cloglog-dpp", version, about = "Update scheduling for sequential cloglog experiments")]
#[command(args_override_self = true)]
struct Cli {
    /// Random seed.
    #[arg(long, global = true, default_value_t = bench::DEFAULT_SEED)]
    seed: u64,
    /// Output directory for CSV files; without it CSV goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` lines read as flags; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[command(args_override_self = true)]
enum Command {
    /// Two-point locally D-optimal design for given parameters.
    #[command(allow_negative_numbers = true)]
    Design {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Maximize the criterion reached by a time horizon.
    #[command(allow_negative_numbers = true)]
    SolveMaxD {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        cs: u32,
        #[arg(long)]
        d0: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Grid upper bound; defaults to the largest reachable criterion.
        #[arg(long)]
        d_max: Option<f64>,
    },
    /// Minimize the time to reach a target criterion.
    #[command(allow_negative_numbers = true)]
    SolveMinTime {
        #[arg(long)]
        d0: f64,
        #[arg(long)]
        dfinal: f64,
        #[arg(long)]
        cs: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Monte-Carlo replications of the sequential experiment.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Run the acceptance criteria.
    Bench {
        /// Replications for the benchmark comparison.
        #[arg(long, default_value_t = 100)]
        n_reps: usize,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Grid lower bound; defaults to D0.
    #[arg(long)]
    d_min: Option<f64>,
    #[arg(long, value_enum, default_value_t = Spacing::Geometric)]
    spacing: Spacing,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Spacing {
    Geometric,
    Uniform,
}

impl From<Spacing> for GridSpacing {
    fn from(s: Spacing) -> Self {
        match s {
            Spacing::Geometric => GridSpacing::Geometric,
            Spacing::Uniform => GridSpacing::Uniform,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Preset {
    /// Switching benchmark: (a, b) = (0.24, -61), T = 3500, Cs = 228, 100 reps.
    #[value(name = "benchmark", alias = "paper-s4")]
    Benchmark,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum PolicyKind {
    DppMaxD,
    DppMinTime,
    AdhocGrowth,
    FixedBatch,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum, default_value_t = PolicyKind::DppMaxD)]
    policy: PolicyKind,
    /// Stage growth for adhoc-growth.
    #[arg(long, default_value_t = 0.10)]
    rate: f64,
    /// Stage size for fixed-batch.
    #[arg(long)]
    batch: Option<u64>,
    #[arg(long)]
    n_reps: Option<usize>,
    /// True slope.
    #[arg(long)]
    a: Option<f64>,
    /// True intercept.
    #[arg(long)]
    b: Option<f64>,
    /// Time budget after initialization.
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    cs: Option<u32>,
    /// Measurements in each initialization batch.
    #[arg(long)]
    init_stage: Option<usize>,
    #[arg(long)]
    guess_a: Option<f64>,
    #[arg(long)]
    guess_b: Option<f64>,
    /// Criterion the DPP schedule is solved from.
    #[arg(long)]
    d0: Option<f64>,
    /// Target criterion for dpp-min-time.
    #[arg(long)]
    dfinal: Option<f64>,
    /// Evaluate the observed criterion at the true parameters.
    #[arg(long)]
    at_truth: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = if err.is_numerical() {
            3
        } else if matches!(err, Error::Io(_)) {
            1
        } else {
            2
        };
        Failure { code, message: err.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure { code: 1, message: err.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect(), SUBCOMMANDS) {
        Ok(args) => args,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Design { a, b } => design(a, b),
        Command::SolveMaxD { t, cs, d0, grid, d_max } => solve_max(t, cs, d0, &grid, d_max, out),
        Command::SolveMinTime { d0, dfinal, cs, grid } => solve_min(d0, dfinal, cs, &grid, out),
        Command::Simulate(args) => simulate(&args, cli.seed, out),
        Command::Bench { n_reps } => run_bench(n_reps, cli.seed),
    }
}

fn design(a: f64, b: f64) -> Outcome {
    let params = ModelParams::new(a, b)?;
    let design = optimal_covariates(&params)?;
    let d = d_criterion(&fisher_information(&params, &[design.x1, design.x2]))?;
    println!("z1 = {:.11}", design.z1);
    println!("z2 = {:.11}", design.z2);
    println!("x1 = {:.9}", design.x1);
    println!("x2 = {:.9}", design.x2);
    // One measurement at each point, in the units of (a, b).
    println!("sqrt(det J) = {d:.9}");
    Ok(())
}

fn output_dir(out: &Path) -> io::Result<&Path> {
    fs::create_dir_all(out)?;
    Ok(out)
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn print_schedule(schedule: &Schedule) -> Outcome {
    let stdout = io::stdout();
    write_schedule(schedule, stdout.lock())?;
    Ok(())
}

fn solve_max(t: u32, cs: u32, d0: f64, grid: &GridArgs, d_max: Option<f64>, out: Option<&Path>) -> Outcome {
    let model = AccumulationModel::default();
    let config = MaxDConfig::new(t, cs, d0, &model).with_grid_points(grid.grid_points).with_spacing(grid.spacing.into());
    let upper = d_max.unwrap_or(config.d_max);
    let config = config.with_bounds(grid.d_min.unwrap_or(d0), upper);
    config.validate(&model)?;
    let table = solve_max_d(&config, &model)?;
    let schedule = extract_schedule_max_d(&table, d0)?;
    println!(
        "u(D0 = {d0}, 0) = {:.6}; {} updates at {:?}; predicted final D {:.6}",
        table.value_at(d0, 0),
        schedule.len(),
        schedule.update_times,
        schedule.final_d
    );
    match out {
        Some(out) => {
            let dir = output_dir(out)?;
            write_max_d_table(&table, create(dir, "max_d_table.csv")?)?;
            write_schedule(&schedule, create(dir, "schedule.csv")?)?;
            println!("wrote {} and {}", dir.join("max_d_table.csv").display(), dir.join("schedule.csv").display());
            Ok(())
        }
        None => print_schedule(&schedule),
    }
}

fn solve_min(d0: f64, dfinal: f64, cs: u32, grid: &GridArgs, out: Option<&Path>) -> Outcome {
    if !(d0 > 0.0 && dfinal > 0.0 && d0.is_finite() && dfinal.is_finite()) {
        return Err(usage(format!("need positive finite D0 and D_final, got {d0} and {dfinal}")));
    }
    let model = AccumulationModel::default();
    if d0 >= dfinal {
        println!("D0 = {d0} already reaches D_final = {dfinal}; total time 0, no updates");
        let empty = Schedule {
            update_times: Vec::new(),
            predicted_d: Vec::new(),
            end_time: 0,
            final_d: d0,
            total_cost: Some(0),
            update_cost: cs,
        };
        return match out {
            Some(out) => Ok(write_schedule(&empty, create(output_dir(out)?, "schedule.csv")?)?),
            None => print_schedule(&empty),
        };
    }
    let config = MinTimeConfig::new(d0, dfinal, cs)
        .with_grid_points(grid.grid_points)
        .with_d_min(grid.d_min.unwrap_or(d0))
        .with_spacing(grid.spacing.into());
    config.validate()?;
    let table = solve_min_time(&config, &model)?;
    let schedule = extract_schedule_min_time(&table, d0)?;
    println!(
        "v(D0 = {d0}) = {}; {} updates at {:?}; continuous bound {:.3}",
        schedule.total_cost.unwrap_or(0),
        schedule.len(),
        schedule.update_times,
        model.min_time_closed_form(d0, dfinal)?
    );
    match out {
        Some(out) => {
            let dir = output_dir(out)?;
            write_min_time_table(&table, create(dir, "min_time_table.csv")?)?;
            write_schedule(&schedule, create(dir, "schedule.csv")?)?;
            println!("wrote {} and {}", dir.join("min_time_table.csv").display(), dir.join("schedule.csv").display());
            Ok(())
        }
        None => print_schedule(&schedule),
    }
}

fn simulation_config(args: &SimulateArgs, seed: u64) -> Result<SimulationConfig, Failure> {
    let model = AccumulationModel::default();
    let preset = args.preset.map(|_| benchmark_config(Policy::FixedBatch { size: 1 }, 100, seed));
    let base = preset.clone().unwrap_or(SimulationConfig {
        true_params: ModelParams::standard(),
        horizon: 1000,
        update_cost: 10,
        init_stage: 100,
        init_guess: ModelParams::standard(),
        n_reps: 100,
        seed,
        policy: Policy::FixedBatch { size: 1 },
        observed_d_at_truth: false,
    });
    let true_params = ModelParams::new(args.a.unwrap_or(base.true_params.a), args.b.unwrap_or(base.true_params.b))?;
    let init_guess =
        ModelParams::new(args.guess_a.unwrap_or(base.init_guess.a), args.guess_b.unwrap_or(base.init_guess.b))?;
    let horizon = args.t.unwrap_or(base.horizon);
    let update_cost = args.cs.unwrap_or(base.update_cost);
    let default_d0 = preset.as_ref().map(|_| BENCHMARK_D0);

    let policy = match args.policy {
        PolicyKind::DppMaxD => {
            let d0 = args.d0.or(default_d0).ok_or_else(|| usage("dpp-max-d needs --d0"))?;
            let t = u32::try_from(horizon).map_err(|_| usage("horizon too large for the max-D solver"))?;
            let schedule = if preset.is_some() && args.d0.is_none() && args.t.is_none() && args.cs.is_none() {
                benchmark_schedule(&model)?
            } else {
                let config = MaxDConfig::new(t, update_cost, d0, &model);
                config.validate(&model)?;
                extract_schedule_max_d(&solve_max_d(&config, &model)?, d0)?
            };
            Policy::DppMaxD(schedule)
        }
        PolicyKind::DppMinTime => {
            let d0 = args.d0.or(default_d0).ok_or_else(|| usage("dpp-min-time needs --d0"))?;
            let dfinal = args.dfinal.ok_or_else(|| usage("dpp-min-time needs --dfinal"))?;
            let config = MinTimeConfig::new(d0, dfinal, update_cost);
            config.validate()?;
            Policy::DppMinTime(extract_schedule_min_time(&solve_min_time(&config, &model)?, d0)?)
        }
        PolicyKind::AdhocGrowth => Policy::AdhocGrowth { rate: args.rate },
        PolicyKind::FixedBatch => Policy::FixedBatch { size: args.batch.ok_or_else(|| usage("fixed-batch needs --batch"))? },
    };
    let config = SimulationConfig {
        true_params,
        horizon,
        update_cost,
        init_stage: args.init_stage.unwrap_or(base.init_stage),
        init_guess,
        n_reps: args.n_reps.unwrap_or(base.n_reps),
        seed,
        policy,
        observed_d_at_truth: args.at_truth,
    };
    config.validate()?;
    Ok(config)
}

fn simulate(args: &SimulateArgs, seed: u64, out: Option<&Path>) -> Outcome {
    if args.preset.is_some() {
        println!(
            "update cost {BENCHMARK_UPDATE_COST} measurements ({UPDATE_SECONDS} s / {MEASUREMENT_SECONDS} s = {:.2}, rounded)",
            UPDATE_SECONDS / MEASUREMENT_SECONDS
        );
    }
    let config = simulation_config(args, seed)?;
    println!(
        "truth (a, b) = ({}, {}), T = {}, Cs = {}, initialization {} measurements, {} replications, seed {seed}",
        config.true_params.a, config.true_params.b, config.horizon, config.update_cost, config.init_stage, config.n_reps
    );
    if let Policy::DppMaxD(s) | Policy::DppMinTime(s) = &config.policy {
        println!("schedule: updates at {:?}", s.update_times);
    }
    let (trajectories, skipped) = run_replications(&config)?;
    let rows = aggregate(&trajectories);
    let finals: Vec<f64> = trajectories.iter().map(|t| t.final_observed_d()).collect();
    println!(
        "{}: {} replications, median final observed D {:.6}; {skipped} streams skipped after failed initialization",
        config.policy.name(),
        trajectories.len(),
        median(&finals).unwrap_or(f64::NAN)
    );
    match out {
        Some(out) => {
            let dir = output_dir(out)?;
            write_trajectories(&trajectories, create(dir, "trajectories.csv")?)?;
            write_summary(&rows, config.policy.name(), create(dir, "summary.csv")?)?;
            println!("wrote {} and {}", dir.join("trajectories.csv").display(), dir.join("summary.csv").display());
        }
        None => {
            let stdout = io::stdout();
            write_summary(&rows, config.policy.name(), stdout.lock())?;
        }
    }
    io::stdout().flush()?;
    Ok(())
}

fn run_bench(n_reps: usize, seed: u64) -> Outcome {
    let mut results = Vec::new();
    let mut report = |r: bench::CriterionResult| {
        println!("{}", r.line());
        results.push(r);
    };
    report(bench::optimal_design());
    report(bench::accumulation_parameters());
    report(bench::oracle_equality(seed));
    report(bench::sandwich_bound());
    report(bench::continuum_max_d());
    report(bench::continuum_min_time());
    report(bench::schedule_orderings());
    report(bench::benchmark_dominance(n_reps, seed));
    report(bench::accumulation_convergence(seed));
    println!("criterion 9 (property suites) runs with `cargo test -p cloglog-dpp --test acceptance`");
    let unexpected: Vec<&str> =
        results.iter().filter(|r| !r.passed && !KNOWN_UNATTAINABLE.contains(&r.id)).map(|r| r.id).collect();
    if unexpected.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("criteria failed: {}", unexpected.join(", ")) })
    }
}
