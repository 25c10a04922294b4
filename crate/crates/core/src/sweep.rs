//! Grid evaluation of scheduling policies and stable result emission.
//!
//! Row ordering is total and documented: sweep blocks in declaration
//! order; within a block the PD+PS panel first (sorted by duplication
//! ratio, then load balance) and the NC panel second (sorted by (n, k)
//! pair order, then load balance). Emission is bit-stable: floats are
//! rendered with nine significant digits in scientific notation.

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, McSpec, OutputFormat, ScenarioConfig, SweepSpec};
use crate::sim::{self, SimConfig};
use crate::strategy::{self, PathPair, SchedulingPolicy, StrategyError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("PD+PS sweep with [mc] requires `n` in the sweep block")]
    MissingBlockSize,
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub policy: &'static str,
    pub lb: Option<f64>,
    pub dt: Option<f64>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub q: Option<u64>,
    pub rf: f64,
    pub coding_rate: Option<f64>,
    pub e2e_plr: f64,
    pub mc_plr: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub z: Option<f64>,
    /// Cosmetic marker carried into the pretty-table output.
    pub highlighted: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Nine significant digits, fixed scientific notation. Shortest
/// round-trip formatting is deliberately not used so that emitted files
/// stay byte-stable across toolchains.
pub fn format_float(v: f64) -> String {
    format!("{v:.8e}")
}

fn cell_descriptors(sweep: &SweepSpec) -> Vec<(SchedulingPolicy, Option<usize>)> {
    let mut cells = Vec::new();
    for &dt in &sweep.dt {
        for &lb in &sweep.lb {
            cells.push((
                SchedulingPolicy::Pdps {
                    duplication_ratio_d: dt,
                    load_balance_w1: lb,
                    block_n: sweep.block_n.unwrap_or(0),
                },
                sweep.block_n,
            ));
        }
    }
    for &(n, k) in &sweep.nk {
        for &lb in &sweep.lb {
            cells.push((
                SchedulingPolicy::Nc {
                    generation_k: k,
                    block_n: n,
                    field_size_q: sweep.field_size_q,
                    load_balance_w1: lb,
                    mode: sweep.mode,
                },
                Some(n),
            ));
        }
    }
    cells
}

fn evaluate_cell(
    paths: &PathPair,
    policy: &SchedulingPolicy,
    n: Option<usize>,
    q: u64,
    mc: Option<&McSpec>,
) -> Result<SweepRow, SweepError> {
    let report = strategy::policy_report(paths, policy)?;
    let mut row = match *policy {
        SchedulingPolicy::Pdps { duplication_ratio_d, load_balance_w1, .. } => SweepRow {
            policy: "pdps",
            lb: Some(load_balance_w1),
            dt: Some(duplication_ratio_d),
            k: None,
            n,
            q: None,
            rf: report.redundancy_factor,
            coding_rate: None,
            e2e_plr: report.e2e_plr,
            mc_plr: None,
            mc_stderr: None,
            z: None,
            highlighted: false,
        },
        SchedulingPolicy::Nc { generation_k, block_n, load_balance_w1, .. } => SweepRow {
            policy: "nc",
            lb: Some(load_balance_w1),
            dt: None,
            k: Some(generation_k),
            n: Some(block_n),
            q: Some(q),
            rf: report.redundancy_factor,
            coding_rate: Some(report.redundancy_factor),
            e2e_plr: report.e2e_plr,
            mc_plr: None,
            mc_stderr: None,
            z: None,
            highlighted: false,
        },
        _ => unreachable!("sweeps only emit PDPS and NC cells"),
    };
    if let Some(mc) = mc {
        if matches!(policy, SchedulingPolicy::Pdps { block_n: 0, .. }) {
            return Err(SweepError::MissingBlockSize);
        }
        let config = SimConfig::new(mc.rounds, mc.seed, *policy, *paths);
        let sim = sim::run_policy(&config)?;
        let diff = (sim.empirical_plr - row.e2e_plr).abs();
        row.mc_plr = Some(sim.empirical_plr);
        row.mc_stderr = Some(sim.std_error);
        row.z = Some(if diff == 0.0 { 0.0 } else { diff / sim.std_error });
    }
    Ok(row)
}

/// Evaluate every cell of every sweep block. Cells are independent and
/// evaluated in parallel; assembly order is fixed by cell index.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, SweepError> {
    let paths = config.resolve_paths()?;
    let mut rows = Vec::new();
    for sweep in &config.sweeps {
        let cells = cell_descriptors(sweep);
        let block_rows = cells
            .par_iter()
            .map(|(policy, n)| {
                evaluate_cell(&paths, policy, *n, sweep.field_size_q, config.mc.as_ref())
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.extend(block_rows);
    }
    Ok(SweepResult { rows })
}

pub const CSV_HEADER: &str = "policy,lb,dt,k,n,q,rf,coding_rate,e2e_plr,mc_plr,mc_stderr,z";

fn opt_float(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn opt_int<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn emit_csv(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.policy,
            opt_float(row.lb),
            opt_float(row.dt),
            opt_int(row.k),
            opt_int(row.n),
            opt_int(row.q),
            format_float(row.rf),
            opt_float(row.coding_rate),
            format_float(row.e2e_plr),
            opt_float(row.mc_plr),
            opt_float(row.mc_stderr),
            opt_float(row.z),
        ));
    }
    out
}

pub fn emit_table(result: &SweepResult) -> String {
    let headers = ["policy", "lb", "dt", "k", "n", "q", "rf", "e2e_plr", "mc_plr", "z", ""];
    let mut grid: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
    for row in &result.rows {
        grid.push(vec![
            row.policy.to_string(),
            opt_float(row.lb),
            opt_float(row.dt),
            opt_int(row.k),
            opt_int(row.n),
            opt_int(row.q),
            format_float(row.rf),
            format_float(row.e2e_plr),
            opt_float(row.mc_plr),
            opt_float(row.z),
            if row.highlighted { "*".to_string() } else { String::new() },
        ]);
    }
    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn emit(result: &SweepResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => emit_csv(result),
        OutputFormat::Table => emit_table(result),
    }
}
