//! Scenario harness over the mode solvers: flat config parsing, parallel
//! parameter sweeps with deterministic byte-identical reports, and
//! CSV / JSONL emission.

pub mod checks;
pub mod config;
pub mod report;
pub mod sweep;
pub mod thresholds;

pub use config::{parse_config, CheckKind, ScenarioConfig};
pub use report::{emit_csv, emit_jsonl, parse_csv, parse_jsonl, ReportRow, CSV_HEADER};
pub use sweep::{run_sweep, run_sweep_full, standard_suite, Dump, SweepOutput, DUMP_HEADER};
