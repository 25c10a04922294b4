//! Monte-Carlo execution of scheduling policies against sampled channel
//! paths, including real finite-field rank decoding for network coding.
//!
//! Rounds are partitioned across a fixed number of lanes with
//! independently derived seeds; the lane decomposition is part of the
//! configuration, so parallel and sequential execution produce bit-equal
//! results for the same master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::channel::{ChannelState, GilbertElliottChannel};
use crate::gf::{FieldSpec, GfMatrix};
use crate::strategy::{split_counts, PathPair, SchedulingPolicy, StrategyError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub rounds: u64,
    pub seed: u64,
    pub policy: SchedulingPolicy,
    pub paths: PathPair,
    /// Number of independent worker lanes the rounds are split across.
    pub lanes: usize,
    /// Resample the stationary state at every round instead of carrying
    /// channel state across consecutive rounds. Needed when rounds must be
    /// i.i.d. windows, e.g. for PMF validation.
    pub cold_start: bool,
}

impl SimConfig {
    pub fn new(rounds: u64, seed: u64, policy: SchedulingPolicy, paths: PathPair) -> Self {
        SimConfig { rounds, seed, policy, paths, lanes: 8, cold_start: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Lost information packets / offered information packets.
    pub empirical_plr: f64,
    /// Normal-approximation standard error of `empirical_plr`.
    pub std_error: f64,
    pub rounds_executed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub empirical_plr: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub z_score: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct LaneTally {
    lost: f64,
    offered: f64,
    sum_x: f64,
    sum_x2: f64,
    rounds: u64,
}

impl LaneTally {
    fn merge(mut self, other: LaneTally) -> LaneTally {
        self.lost += other.lost;
        self.offered += other.offered;
        self.sum_x += other.sum_x;
        self.sum_x2 += other.sum_x2;
        self.rounds += other.rounds;
        self
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn lane_seed(master: u64, lane: usize) -> u64 {
    splitmix64(master ^ splitmix64(lane as u64 + 1))
}

struct LaneState {
    rng: ChaCha12Rng,
    state_1: ChannelState,
    state_2: ChannelState,
}

impl LaneState {
    fn new(paths: &PathPair, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let state_1 = paths.channel_1.stationary_state(&mut rng);
        let state_2 = paths.channel_2.stationary_state(&mut rng);
        LaneState { rng, state_1, state_2 }
    }

    /// Occupy `count` consecutive slots on a channel; returns one bool per
    /// slot, true on erasure.
    fn take_slots(
        &mut self,
        channel: &GilbertElliottChannel,
        which: usize,
        count: usize,
    ) -> Vec<bool> {
        let state = if which == 1 { &mut self.state_1 } else { &mut self.state_2 };
        let mut bits = Vec::with_capacity(count);
        for _ in 0..count {
            bits.push(*state == ChannelState::Bad);
            *state = channel.step(*state, &mut self.rng);
        }
        bits
    }
}

/// Lost information units and offered information units for one round.
fn run_round(
    lane: &mut LaneState,
    paths: &PathPair,
    policy: &SchedulingPolicy,
    field: Option<&FieldSpec>,
) -> (f64, f64) {
    let (d, w1, n) = match *policy {
        SchedulingPolicy::Pd { block_n } => (1.0, 0.0, block_n),
        SchedulingPolicy::Ps { load_balance_w1, block_n } => (0.0, load_balance_w1, block_n),
        SchedulingPolicy::Pdps { duplication_ratio_d, load_balance_w1, block_n } => {
            (duplication_ratio_d, load_balance_w1, block_n)
        }
        SchedulingPolicy::Nc { generation_k, block_n, load_balance_w1, .. } => {
            let (n1, n2) = split_counts(load_balance_w1, block_n);
            let lost_1 = lane.take_slots(&paths.channel_1, 1, n1);
            let lost_2 = lane.take_slots(&paths.channel_2, 2, n2);
            let received =
                lost_1.iter().chain(&lost_2).filter(|&&erased| !erased).count();
            let spec = field.expect("field spec required for NC");
            let recovered = received >= generation_k
                && GfMatrix::random(received, generation_k, spec, &mut lane.rng).rank(spec)
                    == generation_k;
            let lost = if recovered { 0.0 } else { generation_k as f64 };
            return (lost, block_n as f64);
        }
    };
    // PD+PS family: duplicated block first, then the split remainder.
    let n_dup = ((d * n as f64).round() as usize).min(n);
    let (n1, n2) = split_counts(w1, n - n_dup);
    let dup_1 = lane.take_slots(&paths.channel_1, 1, n_dup);
    let split_1 = lane.take_slots(&paths.channel_1, 1, n1);
    let dup_2 = lane.take_slots(&paths.channel_2, 2, n_dup);
    let split_2 = lane.take_slots(&paths.channel_2, 2, n2);
    let mut lost = 0usize;
    for (a, b) in dup_1.iter().zip(&dup_2) {
        if *a && *b {
            lost += 1;
        }
    }
    lost += split_1.iter().filter(|&&e| e).count();
    lost += split_2.iter().filter(|&&e| e).count();
    (lost as f64, n as f64)
}

fn run_lane(config: &SimConfig, lane_idx: usize, rounds: u64) -> Result<LaneTally, StrategyError> {
    let field = match config.policy {
        SchedulingPolicy::Nc { field_size_q, .. } => Some(FieldSpec::new(field_size_q)?),
        _ => None,
    };
    let mut lane = LaneState::new(&config.paths, lane_seed(config.seed, lane_idx));
    let mut tally = LaneTally::default();
    for _ in 0..rounds {
        if config.cold_start {
            lane.state_1 = config.paths.channel_1.stationary_state(&mut lane.rng);
            lane.state_2 = config.paths.channel_2.stationary_state(&mut lane.rng);
        }
        let (lost, offered) = run_round(&mut lane, &config.paths, &config.policy, field.as_ref());
        let x = lost / offered;
        tally.lost += lost;
        tally.offered += offered;
        tally.sum_x += x;
        tally.sum_x2 += x * x;
        tally.rounds += 1;
    }
    Ok(tally)
}

fn lane_rounds(total: u64, lanes: usize) -> Vec<u64> {
    let base = total / lanes as u64;
    let extra = total % lanes as u64;
    (0..lanes as u64).map(|i| base + u64::from(i < extra)).collect()
}

fn finish(tally: LaneTally) -> SimResult {
    let mean = tally.sum_x / tally.rounds as f64;
    let var = (tally.sum_x2 / tally.rounds as f64 - mean * mean).max(0.0);
    SimResult {
        empirical_plr: tally.lost / tally.offered,
        std_error: (var / tally.rounds as f64).sqrt(),
        rounds_executed: tally.rounds,
    }
}

/// Execute the configured policy, lanes in parallel.
pub fn run_policy(config: &SimConfig) -> Result<SimResult, StrategyError> {
    assert!(config.rounds >= 1 && config.lanes >= 1);
    // Collect per-lane tallies in lane order and merge them sequentially:
    // float accumulation order must not depend on rayon's split tree.
    let tallies = lane_rounds(config.rounds, config.lanes)
        .into_par_iter()
        .enumerate()
        .map(|(idx, rounds)| run_lane(config, idx, rounds))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(finish(tallies.into_iter().fold(LaneTally::default(), LaneTally::merge)))
}

/// Same computation on the current thread; must agree bit-for-bit with
/// [`run_policy`].
pub fn run_policy_sequential(config: &SimConfig) -> Result<SimResult, StrategyError> {
    assert!(config.rounds >= 1 && config.lanes >= 1);
    let mut tally = LaneTally::default();
    for (idx, rounds) in lane_rounds(config.rounds, config.lanes).into_iter().enumerate() {
        tally = tally.merge(run_lane(config, idx, rounds)?);
    }
    Ok(finish(tally))
}

/// Compare a simulation run against an analytic prediction.
pub fn convergence_report(
    config: &SimConfig,
    analytic: f64,
    tolerance_sigma: f64,
) -> Result<ConvergenceReport, StrategyError> {
    assert!((0.0..=1.0).contains(&analytic));
    let result = run_policy(config)?;
    let diff = (result.empirical_plr - analytic).abs();
    let z_score = if diff == 0.0 { 0.0 } else { diff / result.std_error };
    Ok(ConvergenceReport {
        empirical_plr: result.empirical_plr,
        std_error: result.std_error,
        analytic,
        z_score,
        pass: z_score <= tolerance_sigma,
    })
}
