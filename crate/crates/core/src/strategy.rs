//! Closed-form end-to-end packet-loss rate for the four scheduling
//! policies over two independent channels: packet duplication (PD),
//! packet splitting (PS), their mix (PD+PS), and random linear network
//! coding (NC).

use thiserror::Error;

use crate::channel::{ChannelError, GilbertElliottChannel, LossPmf};
use crate::gf::{full_rank_prob_exact, FieldSpec, GfError};

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("generation size {k} exceeds block size {n}")]
    InvalidGeneration { k: usize, n: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// The two independent paths of a dual-connectivity link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPair {
    pub channel_1: GilbertElliottChannel,
    pub channel_2: GilbertElliottChannel,
}

impl PathPair {
    pub fn new(channel_1: GilbertElliottChannel, channel_2: GilbertElliottChannel) -> Self {
        PathPair { channel_1, channel_2 }
    }

    /// Stationary loss rates of the two paths.
    pub fn loss_rates(&self) -> Result<(f64, f64), ChannelError> {
        Ok((
            self.channel_1.stationary()?.pi_bad,
            self.channel_2.stationary()?.pi_bad,
        ))
    }
}

/// How the coded-recovery probability treats the received-packet count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcMode {
    /// Failure summed over loss counts l >= n - k, decode probability
    /// taken at a full block of n received packets. Reproduces the
    /// published expression verbatim.
    Paper,
    /// Failure summed over l > n - k, decodability conditioned on the
    /// actual n - l received packets.
    Exact,
}

/// Traffic scheduling policy across the two paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchedulingPolicy {
    /// Every packet duplicated on both paths.
    Pd { block_n: usize },
    /// A round of `block_n` packets split between the paths.
    Ps { load_balance_w1: f64, block_n: usize },
    /// Fraction `duplication_ratio_d` of the round duplicated, the
    /// remainder split.
    Pdps {
        duplication_ratio_d: f64,
        load_balance_w1: f64,
        block_n: usize,
    },
    /// `generation_k` information packets coded into `block_n`
    /// transmissions split between the paths.
    Nc {
        generation_k: usize,
        block_n: usize,
        field_size_q: u64,
        load_balance_w1: f64,
        mode: NcMode,
    },
}

/// Loss rate plus the bandwidth cost of achieving it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyReport {
    /// Expected fraction of information packets lost end to end.
    pub e2e_plr: f64,
    /// Transmitted packets per information packet: 1 + d for PD+PS,
    /// n / k for NC.
    pub redundancy_factor: f64,
}

/// Integer split of a round of `n` packets: `n1` on path 1, `n - n1` on
/// path 2, ties rounding toward path 1.
pub fn split_counts(w1: f64, n: usize) -> (usize, usize) {
    let n1 = ((w1 * n as f64).round() as usize).min(n);
    (n1, n - n1)
}

/// Duplication loss rate: a packet is lost iff both paths erase it.
pub fn pd_plr(p1: f64, p2: f64) -> f64 {
    p1 * p2
}

/// Distribution of the total loss count when `n1` packets go on path 1
/// and `n2` on path 2: the convolution of the two per-channel loss PMFs.
pub fn ps_loss_pmf(paths: &PathPair, n1: usize, n2: usize) -> Result<LossPmf, StrategyError> {
    let pmf1 = if n1 > 0 {
        paths.channel_1.loss_pmf(n1)?
    } else {
        LossPmf::empty()
    };
    let pmf2 = if n2 > 0 {
        paths.channel_2.loss_pmf(n2)?
    } else {
        LossPmf::empty()
    };
    Ok(pmf1.convolve(&pmf2))
}

/// Splitting loss rate: the expected lost fraction, a convex combination
/// of the two stationary loss rates.
pub fn ps_plr(paths: &PathPair, w1: f64) -> Result<f64, StrategyError> {
    let (p1, p2) = paths.loss_rates()?;
    Ok(w1 * p1 + (1.0 - w1) * p2)
}

/// Combined duplication + splitting: fraction `d` of traffic duplicated,
/// the rest split with balance `w1`.
pub fn pdps_plr(paths: &PathPair, d: f64, w1: f64) -> Result<PolicyReport, StrategyError> {
    let (p1, p2) = paths.loss_rates()?;
    Ok(PolicyReport {
        e2e_plr: d * pd_plr(p1, p2) + (1.0 - d) * (w1 * p1 + (1.0 - w1) * p2),
        redundancy_factor: 1.0 + d,
    })
}

/// Probability that a generation of `k` information packets is recovered
/// when `n1 + n2` coded packets are split across the paths.
pub fn nc_recovery_prob(
    paths: &PathPair,
    n1: usize,
    n2: usize,
    k: usize,
    field: &FieldSpec,
    mode: NcMode,
) -> Result<f64, StrategyError> {
    let n = n1 + n2;
    if k > n || k == 0 {
        return Err(StrategyError::InvalidGeneration { k, n });
    }
    let pmf = ps_loss_pmf(paths, n1, n2)?;
    let mass = pmf.mass();
    let p_rec = match mode {
        NcMode::Paper => {
            let no_failure: f64 = mass[..n - k].iter().sum();
            no_failure * full_rank_prob_exact(n, k, field)
        }
        NcMode::Exact => (0..=n - k)
            .map(|l| mass[l] * full_rank_prob_exact(n - l, k, field))
            .sum(),
    };
    Ok(p_rec.clamp(0.0, 1.0))
}

/// Coded loss rate: the generation of `k` packets is lost with
/// probability `1 - P_rec`, normalized by the `n` transmissions.
pub fn nc_plr(
    paths: &PathPair,
    n1: usize,
    n2: usize,
    k: usize,
    field: &FieldSpec,
    mode: NcMode,
) -> Result<PolicyReport, StrategyError> {
    let n = n1 + n2;
    let p_rec = nc_recovery_prob(paths, n1, n2, k, field, mode)?;
    Ok(PolicyReport {
        e2e_plr: (k as f64 / n as f64) * (1.0 - p_rec),
        redundancy_factor: n as f64 / k as f64,
    })
}

/// Evaluate any policy analytically.
pub fn policy_report(paths: &PathPair, policy: &SchedulingPolicy) -> Result<PolicyReport, StrategyError> {
    match *policy {
        SchedulingPolicy::Pd { .. } => {
            let (p1, p2) = paths.loss_rates()?;
            Ok(PolicyReport { e2e_plr: pd_plr(p1, p2), redundancy_factor: 2.0 })
        }
        SchedulingPolicy::Ps { load_balance_w1, .. } => Ok(PolicyReport {
            e2e_plr: ps_plr(paths, load_balance_w1)?,
            redundancy_factor: 1.0,
        }),
        SchedulingPolicy::Pdps { duplication_ratio_d, load_balance_w1, .. } => {
            pdps_plr(paths, duplication_ratio_d, load_balance_w1)
        }
        SchedulingPolicy::Nc { generation_k, block_n, field_size_q, load_balance_w1, mode } => {
            let (n1, n2) = split_counts(load_balance_w1, block_n);
            let field = FieldSpec::new(field_size_q)?;
            nc_plr(paths, n1, n2, generation_k, &field, mode)
        }
    }
}
