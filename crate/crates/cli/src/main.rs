//! Command-line front end: single-policy analysis, grid sweeps,
//! Monte-Carlo simulation, table calibration, and golden reproduction.
//!
//! Exit codes: 0 success, 1 validation failure, 2 golden mismatch
//! (`reproduce-tables`), 3 infeasible calibration.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dcsched::calibrate::{calibrate_tables, DEFAULT_Q_CANDIDATES};
use dcsched::config::{OutputFormat, ScenarioConfig};
use dcsched::sim::{self, SimConfig};
use dcsched::strategy::{self, SchedulingPolicy};
use dcsched::sweep::{self, format_float};
use dcsched::tables::ALL_TABLES;
use dcsched::NcMode;

const FIXTURES: &[(&str, &str, &str)] = &[
    (
        "table1",
        include_str!("../fixtures/table1.cfg"),
        include_str!("../fixtures/golden/table1.csv"),
    ),
    (
        "table2",
        include_str!("../fixtures/table2.cfg"),
        include_str!("../fixtures/golden/table2.csv"),
    ),
    (
        "table3",
        include_str!("../fixtures/table3.cfg"),
        include_str!("../fixtures/golden/table3.csv"),
    ),
];

#[derive(Parser)]
#[command(name = "dcsched", version, about = "Dual-connectivity scheduling loss analytics")]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyKind {
    Pd,
    Ps,
    Pdps,
    Nc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Paper,
    Exact,
}

impl From<ModeArg> for NcMode {
    fn from(m: ModeArg) -> NcMode {
        match m {
            ModeArg::Paper => NcMode::Paper,
            ModeArg::Exact => NcMode::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Table,
}

/// Flags that pin down one scheduling policy.
#[derive(Args)]
struct PolicyArgs {
    #[arg(long, value_enum)]
    policy: PolicyKind,
    /// Load balance: share of the split traffic on the first channel.
    #[arg(long, default_value_t = 0.5)]
    lb: f64,
    /// Duplication ratio for pdps.
    #[arg(long, default_value_t = 0.0)]
    dt: f64,
    /// Block size (transmissions per round).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Generation size for nc.
    #[arg(long)]
    k: Option<usize>,
    /// Field size for nc.
    #[arg(long, default_value_t = 256)]
    q: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

impl PolicyArgs {
    fn build(&self) -> Result<SchedulingPolicy, String> {
        Ok(match self.policy {
            PolicyKind::Pd => SchedulingPolicy::Pd { block_n: self.n },
            PolicyKind::Ps => SchedulingPolicy::Ps { load_balance_w1: self.lb, block_n: self.n },
            PolicyKind::Pdps => SchedulingPolicy::Pdps {
                duplication_ratio_d: self.dt,
                load_balance_w1: self.lb,
                block_n: self.n,
            },
            PolicyKind::Nc => SchedulingPolicy::Nc {
                generation_k: self.k.ok_or("--k is required for --policy nc")?,
                block_n: self.n,
                field_size_q: self.q,
                load_balance_w1: self.lb,
                mode: self.mode.into(),
            },
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one policy analytically against the configured channels.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Evaluate every cell of the configured sweep grids.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Write here instead of the config's output path / stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Monte-Carlo simulate one policy and compare to the closed form.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value_t = 1_000_000)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit channel parameters from the published tables and report
    /// residuals per (q, mode) candidate.
    Calibrate {
        /// Restrict the candidate field sizes (default: 16, 256, 65536).
        #[arg(long)]
        q: Vec<u64>,
    },
    /// Re-run the shipped table fixtures and diff against golden CSVs.
    ReproduceTables {
        /// Also write the regenerated CSVs into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not failures.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("error: could not configure {jobs} worker threads");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ScenarioConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Analyze { config, policy } => {
            let config = load_config(&config)?;
            let paths = config.resolve_paths().map_err(|e| e.to_string())?;
            let policy = policy.build()?;
            let report =
                strategy::policy_report(&paths, &policy).map_err(|e| e.to_string())?;
            println!("e2e_plr = {}", format_float(report.e2e_plr));
            println!("rf = {}", format_float(report.redundancy_factor));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, out, format } => {
            let mut scenario = load_config(&config)?;
            if let Some(format) = format {
                scenario.output.format = match format {
                    FormatArg::Csv => OutputFormat::Csv,
                    FormatArg::Table => OutputFormat::Table,
                };
            }
            let result = sweep::run_sweep(&scenario).map_err(|e| e.to_string())?;
            let rendered = sweep::emit(&result, scenario.output.format);
            match out.or(scenario.output.path) {
                Some(path) => fs::write(&path, rendered)
                    .map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{rendered}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { config, policy, rounds, seed } => {
            let config = load_config(&config)?;
            let paths = config.resolve_paths().map_err(|e| e.to_string())?;
            let policy = policy.build()?;
            let analytic =
                strategy::policy_report(&paths, &policy).map_err(|e| e.to_string())?;
            let sim_config = SimConfig::new(rounds, seed, policy, paths);
            let result = sim::run_policy(&sim_config).map_err(|e| e.to_string())?;
            let diff = (result.empirical_plr - analytic.e2e_plr).abs();
            let z = if diff == 0.0 { 0.0 } else { diff / result.std_error };
            println!("analytic_plr = {}", format_float(analytic.e2e_plr));
            println!("mc_plr = {}", format_float(result.empirical_plr));
            println!("mc_stderr = {}", format_float(result.std_error));
            println!("z = {}", format_float(z));
            println!("rounds = {}", result.rounds_executed);
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate { q } => {
            let candidates: &[u64] = if q.is_empty() { DEFAULT_Q_CANDIDATES } else { &q };
            let report =
                calibrate_tables(ALL_TABLES, candidates).map_err(|e| e.to_string())?;
            for (i, c) in report.candidates.iter().enumerate() {
                let marker = if report.best == Some(i) { " <- best" } else { "" };
                match &c.infeasible {
                    Some(reason) => {
                        println!("q={} mode={:?}: infeasible ({reason})", c.q, c.mode)
                    }
                    None => println!(
                        "q={} mode={:?}: max_rel_err={} mean_rel_err={}{marker}",
                        c.q,
                        c.mode,
                        format_float(c.max_rel_err),
                        format_float(c.mean_rel_err),
                    ),
                }
            }
            let Some(best) = report.best_candidate() else {
                eprintln!("error: no feasible calibration candidate");
                return Ok(ExitCode::from(3));
            };
            for (label, ch) in &best.channels {
                println!(
                    "channel {label}: p_stay_good={} p_stay_bad={}",
                    format_float(ch.p_stay_good()),
                    format_float(ch.p_stay_bad()),
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ReproduceTables { out } => {
            let mut mismatched = false;
            for (name, cfg_text, golden) in FIXTURES {
                let scenario = ScenarioConfig::parse(cfg_text)
                    .map_err(|e| format!("fixture {name}: {e}"))?;
                let result = sweep::run_sweep(&scenario).map_err(|e| e.to_string())?;
                let csv = sweep::emit_csv(&result);
                if let Some(dir) = &out {
                    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                    let path = dir.join(format!("{name}.csv"));
                    fs::write(&path, &csv).map_err(|e| format!("{}: {e}", path.display()))?;
                }
                if csv == *golden {
                    println!("{name}: ok ({} rows)", result.rows.len());
                } else {
                    mismatched = true;
                    let diff_line = csv
                        .lines()
                        .zip(golden.lines())
                        .position(|(a, b)| a != b)
                        .map(|i| i + 1)
                        .unwrap_or_else(|| csv.lines().count().min(golden.lines().count()) + 1);
                    println!("{name}: MISMATCH (first differing line {diff_line})");
                }
            }
            Ok(if mismatched { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
    }
}
