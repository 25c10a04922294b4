//! Reverse-fitting chain parameters from published loss tables.
//!
//! The tables publish, per satellite, the stationary loss rate (the
//! single-path RF = 1 cells) and the loss of the uncoded-rate NC row
//! (K = N = 10) with the whole block on one link. The second figure pins
//! the zero-loss window probability once a field size is assumed:
//! `P(0 losses in 10) = (1 - plr) / P_dec(10, 10, q)`. Neither the chain
//! parameters nor q are published, so the fit is evaluated under every
//! candidate (q, mode) combination and the residuals over all NC cells
//! decide the winner.

use std::collections::BTreeMap;

use crate::channel::{ChannelError, GilbertElliottChannel};
use crate::gf::{full_rank_prob_exact, FieldSpec};
use crate::strategy::{nc_plr, split_counts, NcMode, PathPair, StrategyError};
use crate::tables::PaperTable;

/// Window length of the rows that pin the zero-loss probability.
const FIT_WINDOW: usize = 10;

pub const DEFAULT_Q_CANDIDATES: &[u64] = &[16, 256, 65536];
pub const MODES: &[NcMode] = &[NcMode::Paper, NcMode::Exact];

#[derive(Debug, Clone, PartialEq)]
pub struct CellResidual {
    pub table: &'static str,
    pub n: usize,
    pub k: usize,
    pub lb: f64,
    pub expected: f64,
    pub actual: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitCandidate {
    pub q: u64,
    pub mode: NcMode,
    /// Fitted channel per satellite label, when calibration is feasible.
    pub channels: BTreeMap<&'static str, GilbertElliottChannel>,
    pub infeasible: Option<String>,
    pub residuals: Vec<CellResidual>,
    pub max_rel_err: f64,
    pub mean_rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub candidates: Vec<FitCandidate>,
    /// Index into `candidates` of the feasible candidate with the
    /// smallest maximum relative error.
    pub best: Option<usize>,
}

impl FitReport {
    pub fn best_candidate(&self) -> Option<&FitCandidate> {
        self.best.map(|i| &self.candidates[i])
    }
}

fn fit_channels(
    tables: &[&PaperTable],
    q: u64,
) -> Result<BTreeMap<&'static str, GilbertElliottChannel>, String> {
    let field = FieldSpec::new(q).map_err(|e| e.to_string())?;
    let decode = full_rank_prob_exact(FIT_WINDOW, FIT_WINDOW, &field);
    let mut fitted = BTreeMap::new();
    for table in tables {
        for sat in [&table.s1, &table.s2] {
            if fitted.contains_key(sat.label) {
                continue;
            }
            let zero_loss = (1.0 - sat.kn10_plr) / decode;
            let channel = GilbertElliottChannel::calibrate(sat.pi_bad, zero_loss, FIT_WINDOW)
                .map_err(|e: ChannelError| format!("{}: {e}", sat.label))?;
            fitted.insert(sat.label, channel);
        }
    }
    Ok(fitted)
}

fn evaluate_candidate(
    tables: &[&PaperTable],
    channels: &BTreeMap<&'static str, GilbertElliottChannel>,
    q: u64,
    mode: NcMode,
) -> Result<Vec<CellResidual>, StrategyError> {
    let field = FieldSpec::new(q)?;
    let mut residuals = Vec::new();
    for table in tables {
        let paths = PathPair::new(channels[table.s1.label], channels[table.s2.label]);
        for block in table.nc {
            for (k_idx, &k) in block.k.iter().enumerate() {
                for (lb_idx, &lb) in block.lb.iter().enumerate() {
                    let expected = block.plr[k_idx][lb_idx];
                    let (n1, n2) = split_counts(lb, block.n);
                    let actual = nc_plr(&paths, n1, n2, k, &field, mode)?.e2e_plr;
                    let rel_err = if expected != 0.0 {
                        (actual - expected).abs() / expected
                    } else {
                        actual.abs()
                    };
                    residuals.push(CellResidual {
                        table: table.name,
                        n: block.n,
                        k,
                        lb,
                        expected,
                        actual,
                        rel_err,
                    });
                }
            }
        }
    }
    Ok(residuals)
}

/// Fit channels from golden tables under every candidate (q, mode) pair
/// and rank the combinations by worst-case relative error over all NC
/// cells.
pub fn calibrate_tables(
    tables: &[&PaperTable],
    q_candidates: &[u64],
) -> Result<FitReport, StrategyError> {
    let mut candidates = Vec::new();
    for &q in q_candidates {
        let fit = fit_channels(tables, q);
        for &mode in MODES {
            let candidate = match &fit {
                Err(reason) => FitCandidate {
                    q,
                    mode,
                    channels: BTreeMap::new(),
                    infeasible: Some(reason.clone()),
                    residuals: Vec::new(),
                    max_rel_err: f64::INFINITY,
                    mean_rel_err: f64::INFINITY,
                },
                Ok(channels) => {
                    let residuals = evaluate_candidate(tables, channels, q, mode)?;
                    let max_rel_err =
                        residuals.iter().map(|r| r.rel_err).fold(0.0f64, f64::max);
                    let mean_rel_err = residuals.iter().map(|r| r.rel_err).sum::<f64>()
                        / residuals.len() as f64;
                    FitCandidate {
                        q,
                        mode,
                        channels: channels.clone(),
                        infeasible: None,
                        residuals,
                        max_rel_err,
                        mean_rel_err,
                    }
                }
            };
            candidates.push(candidate);
        }
    }
    let best = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.infeasible.is_none())
        .min_by(|(_, a), (_, b)| a.max_rel_err.total_cmp(&b.max_rel_err))
        .map(|(i, _)| i);
    Ok(FitReport { candidates, best })
}
