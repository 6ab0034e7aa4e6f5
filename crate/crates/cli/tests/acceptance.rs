//! Acceptance criteria AC1–AC11 at full size, one PASS/FAIL line each.
//!
//! Tolerances are the suite defaults: metric inequalities 1e-12, oracle step
//! 0.01 with slack 0.02, bridge round trips 1e-9, aggregate tolerance 1e-9.

use std::io::Write;
use std::time::{Duration, Instant};

use tropimeas_cli::suite::{run_criterion, SuiteConfig, CRITERIA};

/// Writes past libtest's output capture, so the lines show in a plain `cargo test` run.
macro_rules! report {
    ($($arg:tt)*) => {
        writeln!(std::io::stderr(), $($arg)*).unwrap()
    };
}

fn budget(id: &str) -> Option<Duration> {
    match id {
        "AC1" => Some(Duration::from_secs(60)),
        "AC2" => Some(Duration::from_secs(10)),
        _ => None,
    }
}

#[test]
fn acceptance_criteria() {
    let config = SuiteConfig::default();
    let tol = &config.tolerances;
    report!(
        "seed {} | metric tol {:e} | oracle step {} slack {} | round trip {:e} | aggregate tol {:e}",
        config.seed, tol.metric, tol.oracle_step, tol.oracle_slack, tol.round_trip, tol.aggregate
    );
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let result = run_criterion(&config, id).unwrap();
        let elapsed = start.elapsed();
        let over_budget = budget(id).is_some_and(|b| elapsed > b);
        let ok = result.passed && !over_budget;
        report!(
            "{} {id}: {} [{} instances, {} failures, worst excess {}, {:.2}s{}]",
            if ok { "PASS" } else { "FAIL" },
            result.title,
            result.instances,
            result.failures,
            result.worst_excess.map_or("n/a".to_owned(), |w| format!("{w:e}")),
            elapsed.as_secs_f64(),
            if over_budget { ", over budget" } else { "" },
        );
        if let Some(first) = &result.first_failure {
            report!("    first failure: {first}");
        }
        if !ok {
            failed.push(*id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
