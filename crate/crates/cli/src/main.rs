//! `specsched` — exact solving, Monte Carlo simulation, and experiment
//! tables for opportunistic spectrum scheduling.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use specsched::{
    estimate, evaluate_policy, evaluate_policy_with_states, greedy_action, solve_optimal,
    PolicyKind, PolicySpec, SimConfig,
};
use specsched_cli::config::{ExperimentConfig, ModeChoice, PolicyChoice};
use specsched_cli::report::{
    comparison_csv, curves_csv, to_json, ActionRecord, CountersRecord, SimulateRecord, SolveRecord,
};
use specsched_cli::{experiments, CliError};

#[derive(Parser)]
#[command(
    name = "specsched",
    version,
    about = "Finite-horizon opportunistic spectrum scheduling: exact solver, simulator, and experiment tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance exactly and report value, first action, and state count
    Solve {
        /// JSON experiment config
        #[arg(long)]
        config: PathBuf,
        /// Write the result record here (JSON); defaults to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's observation mode
        #[arg(long)]
        mode: Option<ModeChoice>,
        /// Override the config's policy
        #[arg(long)]
        policy: Option<PolicyChoice>,
    },
    /// Estimate a policy's value by seeded Monte Carlo simulation
    Simulate {
        /// JSON experiment config
        #[arg(long)]
        config: PathBuf,
        /// Write the result record here (JSON); defaults to stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's observation mode
        #[arg(long)]
        mode: Option<ModeChoice>,
        /// Override the config's policy
        #[arg(long)]
        policy: Option<PolicyChoice>,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's trajectory count
        #[arg(long)]
        trajectories: Option<u64>,
    },
    /// Emit the fading-memory (delta) comparison table as CSV
    Table1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the occupancy-memory (u) comparison table as CSV
    Table2 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit conditional idle probability curves with flatness thresholds as CSV
    Curves {
        /// Persistence exponents to sweep
        #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
        u: Vec<u32>,
        /// Idle normalizing constant
        #[arg(long, default_value_t = 1.0)]
        c_i: f64,
        /// Largest age in the series
        #[arg(long, default_value_t = 50)]
        x_max: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            config,
            out,
            mode,
            policy,
        } => cmd_solve(&config, out.as_deref(), mode, policy),
        Command::Simulate {
            config,
            out,
            mode,
            policy,
            seed,
            trajectories,
        } => cmd_simulate(&config, out.as_deref(), mode, policy, seed, trajectories),
        Command::Table1 { out } => {
            let rows = experiments::table1_rows()?;
            emit(&out, comparison_csv("delta", &rows))
        }
        Command::Table2 { out } => {
            let rows = experiments::table2_rows()?;
            emit(&out, comparison_csv("u", &rows))
        }
        Command::Curves { u, c_i, x_max, out } => {
            if u.is_empty() {
                return Err(CliError::Config("need at least one exponent in --u".into()));
            }
            let series = experiments::idle_curves(&u, c_i, x_max)?;
            for s in &series {
                eprintln!("u={}: x0={}", s.exponent, s.threshold_x0);
            }
            emit(&out, curves_csv(&series))
        }
    }
}

/// Policy and mode come from flags first, then the config, then defaults
/// (optimal, original).
fn select(
    cfg: &ExperimentConfig,
    mode: Option<ModeChoice>,
    policy: Option<PolicyChoice>,
) -> (PolicyChoice, ModeChoice) {
    let policy = policy.or(cfg.policy).unwrap_or(PolicyChoice::Optimal);
    let mode = mode.or(cfg.mode).unwrap_or(ModeChoice::Original);
    (policy, mode)
}

fn out_path<'a>(flag: Option<&'a Path>, cfg: &'a ExperimentConfig) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
}

fn cmd_solve(
    config_path: &Path,
    out: Option<&Path>,
    mode: Option<ModeChoice>,
    policy: Option<PolicyChoice>,
) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let (model, initial) = cfg.build()?;
    let (policy_choice, mode_choice) = select(&cfg, mode, policy);
    let spec = PolicySpec {
        kind: policy_choice.kind(),
        mode: mode_choice.mode(),
    };

    let started = Instant::now();
    let (value, first_action, states) = match spec.kind {
        PolicyKind::Optimal => {
            let (value, table) = solve_optimal(&model, &initial, spec.mode)?;
            let action = table
                .best_action(&initial)
                .expect("solved tables contain the initial state");
            (value, Some(action), table.len())
        }
        PolicyKind::Greedy => {
            let (value, states) = evaluate_policy_with_states(spec, &model, &initial)?;
            (value, Some(greedy_action(&initial, &model)?), states)
        }
        PolicyKind::Randomized => {
            let (value, states) = evaluate_policy_with_states(spec, &model, &initial)?;
            (value, None, states)
        }
    };
    let elapsed = started.elapsed();

    let record = SolveRecord {
        command: "solve",
        policy: policy_choice.name(),
        mode: mode_choice.name(),
        value,
        first_action: first_action.map(ActionRecord::from),
        states,
    };
    eprintln!(
        "solve: policy={} mode={} value={value:.6} states={states} wall={:.3}s",
        policy_choice.name(),
        mode_choice.name(),
        elapsed.as_secs_f64()
    );
    write_record(out_path(out, &cfg), to_json(&record))
}

fn cmd_simulate(
    config_path: &Path,
    out: Option<&Path>,
    mode: Option<ModeChoice>,
    policy: Option<PolicyChoice>,
    seed: Option<u64>,
    trajectories: Option<u64>,
) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let (model, initial) = cfg.build()?;
    let (policy_choice, mode_choice) = select(&cfg, mode, policy);
    let spec = PolicySpec {
        kind: policy_choice.kind(),
        mode: mode_choice.mode(),
    };
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let trajectories = trajectories.or(cfg.trajectories).unwrap_or(10_000);

    let sim = SimConfig {
        trajectories,
        seed,
        model: model.clone(),
        initial: initial.clone(),
        policy: spec,
    };
    let started = Instant::now();
    let result = estimate(&sim)?;
    let elapsed = started.elapsed();

    // cross-check against the exact value when the instance permits it
    let exact_value = match evaluate_policy(spec, &model, &initial) {
        Ok(v) => Some(v),
        Err(specsched::Error::InstanceTooLarge(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let discrepancy_sigma = match (exact_value, result.std_error > 0.0) {
        (Some(exact), true) => Some((result.mean - exact).abs() / result.std_error),
        _ => None,
    };

    let record = SimulateRecord {
        command: "simulate",
        policy: policy_choice.name(),
        mode: mode_choice.name(),
        seed,
        trajectories,
        mean: result.mean,
        std_error: result.std_error,
        degenerate_sample: result.degenerate_sample,
        counters: CountersRecord {
            scheduled_slots: result.counters.scheduled_slots,
            noop_slots: result.counters.noop_slots,
            collision_slots: result.counters.collision_slots,
            transmitted_minislots: result.counters.transmitted_minislots,
            successful_minislots: result.counters.successful_minislots,
        },
        exact_value,
        discrepancy_sigma,
    };
    eprintln!(
        "simulate: policy={} mode={} mean={:.6} se={:.6} n={trajectories} wall={:.3}s",
        policy_choice.name(),
        mode_choice.name(),
        result.mean,
        result.std_error,
        elapsed.as_secs_f64()
    );
    if let (Some(exact), Some(sigma)) = (exact_value, discrepancy_sigma) {
        eprintln!("simulate: exact={exact:.6} |mean-exact|={sigma:.2} sigma");
    }
    write_record(out_path(out, &cfg), to_json(&record))
}

fn write_record(out: Option<PathBuf>, text: String) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(&path, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(path: &Path, text: String) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
