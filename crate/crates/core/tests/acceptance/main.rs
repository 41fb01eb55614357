//! Runs every acceptance criterion and prints one line per criterion.
//!
//! `ACCEPTANCE_SEED` overrides the default seed. Criteria listed in
//! `KNOWN_UNATTAINABLE` are reported but do not fail the run.

#[path = "../support/props.rs"]
mod props;

use std::time::Instant;

use cloglog_dpp::bench::{self, CriterionResult, DEFAULT_SEED, KNOWN_UNATTAINABLE};

const CASES: u32 = 200;

fn property_suites() -> CriterionResult {
    let start = Instant::now();
    let failures: Vec<String> = props::SUITES
        .iter()
        .filter_map(|s| (s.run)(CASES).err().map(|e| format!("{}: {e}", s.name)))
        .collect();
    CriterionResult {
        id: "9",
        title: "property suites",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} suites, {CASES} cases each", props::SUITES.len())
        } else {
            failures.join("; ")
        },
        elapsed: start.elapsed(),
    }
}

fn main() {
    let seed = std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let mut results = Vec::new();
    let mut report = |r: CriterionResult| {
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
    report(bench::benchmark_dominance(100, seed));
    report(bench::accumulation_convergence(seed));
    report(property_suites());

    let unexpected: Vec<&str> =
        results.iter().filter(|r| !r.passed && !KNOWN_UNATTAINABLE.contains(&r.id)).map(|r| r.id).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed (seed {seed})", results.len());
    for r in results.iter().filter(|r| !r.passed && KNOWN_UNATTAINABLE.contains(&r.id)) {
        println!("criterion {} is a known unattainable target and does not fail the run", r.id);
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
