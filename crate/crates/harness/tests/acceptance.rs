//! Acceptance gate for the sweep harness: one test per numbered criterion,
//! each printing a single `acceptance criterion N: PASS|FAIL` line. The
//! remaining criteria are exercised by the core crate's acceptance suite.

use std::time::Instant;

use strat_lab::{emit_csv, run_sweep, standard_suite};

fn report(criterion: u32, failures: Vec<String>) {
    let pass = failures.is_empty();
    println!(
        "acceptance criterion {}: {}",
        criterion,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        pass,
        "criterion {} failed:\n{}",
        criterion,
        failures.join("\n")
    );
}

/// Every row of the standard suite passes its threshold, the envelope
/// dominance check runs on every integrated mode, and the whole sweep
/// fits the ten-minute budget at 8 workers.
#[test]
fn criterion_5_standard_suite_envelopes_dominate() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let scenarios = standard_suite();
    let rows = match run_sweep(&scenarios, 8) {
        Ok(rows) => rows,
        Err(e) => {
            report(5, vec![format!("sweep errored: {e}")]);
            return;
        }
    };
    let elapsed = started.elapsed().as_secs_f64();

    if rows.is_empty() {
        failures.push("sweep produced no rows".to_string());
    }
    for row in &rows {
        if !row.pass {
            failures.push(format!(
                "{} ({}, {}, {}) {}: statistic {:e} > threshold {:e}",
                row.scenario, row.mode_k, row.mode_l, row.eta, row.check, row.statistic,
                row.threshold
            ));
        }
    }
    let envelope_rows = rows.iter().filter(|r| r.check == "envelopes").count();
    let divergence_rows = rows.iter().filter(|r| r.check == "divergence").count();
    if envelope_rows == 0 || envelope_rows != divergence_rows {
        failures.push(format!(
            "envelope coverage gap: {envelope_rows} envelope rows vs {divergence_rows} divergence rows"
        ));
    }
    if elapsed > 600.0 {
        failures.push(format!("sweep took {elapsed:.1} s, budget is 600 s"));
    }

    report(5, failures);
}

/// The sweep report is byte-identical across worker counts.
#[test]
fn criterion_9_output_is_deterministic_across_worker_counts() {
    let mut failures = Vec::new();

    let scenarios = standard_suite();
    let mut outputs = Vec::new();
    for workers in [1usize, 4, 8] {
        match run_sweep(&scenarios, workers) {
            Ok(rows) => outputs.push((workers, emit_csv(&rows))),
            Err(e) => failures.push(format!("sweep at {workers} workers errored: {e}")),
        }
    }
    if let Some((w0, first)) = outputs.first() {
        for (w, csv) in &outputs[1..] {
            if csv != first {
                failures.push(format!("{w} workers diverge from {w0} workers"));
            }
        }
    }

    report(9, failures);
}
