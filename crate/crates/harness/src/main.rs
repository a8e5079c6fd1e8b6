//! Command-line front end: scenario sweeps, solver cross-verification
//! commands, and the unstratified lift-up reference table. Exit code 0
//! iff every enabled check passed; 1 on check failures; 2 on config or
//! I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use strat_lab::report::{emit_csv, emit_jsonl, ReportRow};
use strat_lab::sweep::{run_sweep_full, SweepOutput};
use strat_lab::{parse_config, thresholds};
use strat_lab_core::{
    liftup_baseline, propagate_streak, solve_sampled, streak_rhs, AdaptiveOptions64, PhysParams64,
    StreakState64,
};

#[derive(Parser)]
#[command(name = "strat-lab", version, about = "Stratified shear-flow mode laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Copy, Clone, ValueEnum)]
enum GridSize {
    Coarse,
    Fine,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario in a config file and report its check results.
    Run {
        /// Scenario config file (documented flat key = value format).
        config: PathBuf,
        /// Worker threads; STRAT_LAB_THREADS overrides, default all cores.
        #[arg(long)]
        workers: Option<usize>,
        /// Write report (and dumps) into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write one time-series CSV per sheared mode (needs --out).
        #[arg(long)]
        dump_trajectories: bool,
        /// Record per-task wall times in the report rows.
        #[arg(long)]
        timing: bool,
    },
    /// Cross-check the closed-form streak propagator against an adaptive
    /// integration of the raw streak system.
    VerifyStreaks {
        #[arg(long, value_enum, default_value_t = GridSize::Coarse)]
        grid: GridSize,
    },
    /// Run the envelope checks on a compact admissible scenario pair.
    VerifyEnvelopes {
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the unstratified lift-up reference peaks and validate them
    /// against the closed form |u2(0)| / (e nu n^2).
    BaselineLiftup,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Run {
            config,
            workers,
            out,
            format,
            dump_trajectories,
            timing,
        } => cmd_run(&config, workers, out, format, dump_trajectories, timing),
        Command::VerifyStreaks { grid } => cmd_verify_streaks(grid),
        Command::VerifyEnvelopes { workers } => cmd_verify_envelopes(workers),
        Command::BaselineLiftup => cmd_baseline_liftup(),
    };
    match result {
        Ok(all_pass) => {
            eprintln!("total wall time: {:.2?}", start.elapsed());
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_workers(flag: Option<usize>) -> usize {
    if let Ok(raw) = std::env::var("STRAT_LAB_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => return n,
            _ => eprintln!("warning: ignoring invalid STRAT_LAB_THREADS = `{raw}`"),
        }
    }
    flag.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

fn finish_sweep(out: &SweepOutput) {
    for e in &out.errors {
        eprintln!("task error: {e}");
    }
    let failed = out.rows.iter().filter(|r| !r.pass).count();
    eprintln!("{} rows, {} failed", out.rows.len(), failed);
}

fn cmd_run(
    config: &PathBuf,
    workers: Option<usize>,
    out_dir: Option<PathBuf>,
    format: Format,
    dump_trajectories: bool,
    timing: bool,
) -> Result<bool, String> {
    if dump_trajectories && out_dir.is_none() {
        return Err("--dump-trajectories requires --out".to_string());
    }
    let text = std::fs::read_to_string(config)
        .map_err(|e| format!("{}: {e}", config.display()))?;
    let mut scenario = parse_config(&text).map_err(|e| e.to_string())?;
    if timing {
        scenario.timing = true;
    }
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    let workers = resolve_workers(workers);
    let sweep = run_sweep_full(&[scenario], workers, dump_trajectories)
        .map_err(|e| e.to_string())?;
    finish_sweep(&sweep);
    let report = match format {
        Format::Csv => emit_csv(&sweep.rows),
        Format::Jsonl => emit_jsonl(&sweep.rows),
    };
    match out_dir {
        None => print!("{report}"),
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let name = match format {
                Format::Csv => "report.csv",
                Format::Jsonl => "report.jsonl",
            };
            let path = dir.join(name);
            std::fs::write(&path, &report).map_err(|e| format!("{}: {e}", path.display()))?;
            eprintln!("wrote {}", path.display());
            for d in &sweep.dumps {
                let path = dir.join(&d.file_name);
                std::fs::write(&path, &d.csv)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            if !sweep.dumps.is_empty() {
                eprintln!("wrote {} trajectory dumps", sweep.dumps.len());
            }
        }
    }
    Ok(sweep.rows.iter().all(|r| r.pass))
}

/// Relative gap between the closed-form propagator and an adaptive
/// integration of the raw system, floored against deep decay.
fn streak_oracle_gap(
    initial: &StreakState64,
    params: &PhysParams64,
    eta: f64,
    l: i32,
    samples: &[f64],
) -> Result<f64, String> {
    let y0 = [initial.u1, initial.u2, initial.u3, initial.theta];
    let opts = AdaptiveOptions64 {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        max_step: 0.25,
        step_floor: 1e-13,
    };
    let oracle = solve_sampled(
        |_t, y: &[Complex<f64>; 4]| {
            let state = StreakState64 {
                u1: y[0],
                u2: y[1],
                u3: y[2],
                theta: y[3],
            };
            let d = streak_rhs(&state, params, eta, l);
            [d.u1, d.u2, d.u3, d.theta]
        },
        0.0,
        y0,
        samples,
        &opts,
    )
    .map_err(|e| e.to_string())?;
    let amp0 = (initial.u1.norm_sqr()
        + initial.u2.norm_sqr()
        + initial.u3.norm_sqr()
        + initial.theta.norm_sqr())
    .sqrt();
    let mut worst = 0.0f64;
    for (&t, y) in samples.iter().zip(&oracle) {
        let closed = propagate_streak(initial, t, params, eta, l).map_err(|e| e.to_string())?;
        let diff = ((closed.u1 - y[0]).norm_sqr()
            + (closed.u2 - y[1]).norm_sqr()
            + (closed.u3 - y[2]).norm_sqr()
            + (closed.theta - y[3]).norm_sqr())
        .sqrt();
        let amp = (y[0].norm_sqr() + y[1].norm_sqr() + y[2].norm_sqr() + y[3].norm_sqr()).sqrt();
        worst = worst.max(diff / amp.max(1e-4 * amp0));
    }
    Ok(worst)
}

fn cmd_verify_streaks(grid: GridSize) -> Result<bool, String> {
    let (etas, ls, rates, betas): (&[f64], &[i32], &[f64], &[f64]) = match grid {
        GridSize::Coarse => (&[0.0, 1.0, -1.0, 3.0, -3.0], &[1, 2], &[1e-3, 1e-2], &[1.0]),
        GridSize::Fine => (
            &[0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0],
            &[1, 2, 3],
            &[1e-3, 1e-2, 5e-2],
            &[0.75, 1.0, 2.0],
        ),
    };
    let initial = StreakState64 {
        u1: Complex::new(0.3, 0.1),
        u2: Complex::new(1.0, 0.0),
        u3: Complex::new(-0.2, 0.4),
        theta: Complex::new(0.5, -0.3),
    };
    let samples: Vec<f64> = (1..=20).map(|j| 2.5 * f64::from(j)).collect();
    let mut rows = Vec::new();
    for &nu in rates {
        for &kappa in rates {
            for &beta in betas {
                let params = PhysParams64::new(nu, kappa, beta).map_err(|e| e.to_string())?;
                for &l in ls {
                    for &eta in etas {
                        let gap = streak_oracle_gap(&initial, &params, eta, l, &samples)?;
                        let name = format!("nu{nu:e}-kappa{kappa:e}-beta{beta}");
                        rows.push(ReportRow::evaluate(
                            &name,
                            0,
                            l,
                            eta,
                            "streak_oracle",
                            gap,
                            1e-8,
                            0,
                        ));
                    }
                }
            }
        }
    }
    print!("{}", emit_csv(&rows));
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("{} rows, {} failed", rows.len(), failed);
    Ok(failed == 0)
}

fn cmd_verify_envelopes(workers: Option<usize>) -> Result<bool, String> {
    let mut scenarios = Vec::new();
    for (nu, kappa, beta) in [(1e-2f64, 1e-2f64, 1.0f64), (1e-3, 2e-3, 1.0)] {
        let text = format!(
            "[scenario]\n\
             name = env-nu{nu:e}-kappa{kappa:e}-beta{beta}\n\
             [params]\n\
             nu = {nu:e}\n\
             kappa = {kappa:e}\n\
             beta = {beta}\n\
             [modes]\n\
             k = 1, 2\n\
             l = 0, 1, 2\n\
             eta_cutoff = 12\n\
             eta_panels = 16\n\
             eta_nodes_per_panel = 6\n\
             [ic]\n\
             u2 = 1.0, 0.0, 0.0, 1.0\n\
             theta = 0.0, 0.5, 0.0, 1.0\n\
             [checks]\n\
             enable = divergence, envelopes\n"
        );
        scenarios.push(parse_config(&text).map_err(|e| e.to_string())?);
    }
    let sweep = run_sweep_full(&scenarios, resolve_workers(workers), false)
        .map_err(|e| e.to_string())?;
    finish_sweep(&sweep);
    print!("{}", emit_csv(&sweep.rows));
    Ok(sweep.rows.iter().all(|r| r.pass))
}

fn cmd_baseline_liftup() -> Result<bool, String> {
    let initial = StreakState64 {
        u1: Complex::new(0.0, 0.0),
        u2: Complex::new(1.0, 0.0),
        u3: Complex::new(0.0, 0.0),
        theta: Complex::new(0.0, 0.0),
    };
    let (eta, l) = (0.0, 1);
    let mut rows = Vec::new();
    for nu in [1e-2f64, 1e-3] {
        let horizon = 5.0 / nu;
        let mut peak = 0.0f64;
        let mut at = 0.0f64;
        for i in 0..=4000 {
            let t = horizon * f64::from(i) / 4000.0;
            let state =
                liftup_baseline(&initial, t, nu, nu, eta, l).map_err(|e| e.to_string())?;
            if state.u1.norm() > peak {
                peak = state.u1.norm();
                at = t;
            }
        }
        let exact = 1.0 / (core::f64::consts::E * nu);
        eprintln!(
            "nu = {nu:e}: peak |u1| = {peak:.4} at t = {at:.1} (closed form {exact:.4} at {:.1})",
            1.0 / nu
        );
        rows.push(ReportRow::evaluate(
            &format!("baseline-nu{nu:e}"),
            0,
            l,
            eta,
            "liftup_baseline",
            (peak / exact - 1.0).abs(),
            thresholds::LIFTUP_PEAK,
            0,
        ));
    }
    print!("{}", emit_csv(&rows));
    Ok(rows.iter().all(|r| r.pass))
}
