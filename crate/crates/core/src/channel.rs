//! Two-state Markov (Gilbert-Elliott) erasure channel.
//!
//! The chain alternates between a good state (no loss) and a bad state
//! (erasure). It is parameterized by the two diagonal entries of its
//! transition matrix: the probability of staying good and the probability
//! of staying bad. Everything else — stationary loss rate, the exact
//! distribution of the number of losses in a window, sample paths, and
//! reverse-fitting parameters from observed statistics — derives from
//! those two numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Absolute tolerance used by [`GilbertElliottChannel::calibrate`].
pub const CALIBRATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("probability {value} for {field} is outside [0, 1]")]
    InvalidProbability { field: &'static str, value: f64 },
    #[error("chain has no unique stationary distribution (both states absorbing)")]
    DegenerateChain,
    #[error("window must be >= 1")]
    EmptyWindow,
    #[error("no ergodic channel satisfies the calibration targets: {0}")]
    Infeasible(String),
}

/// Channel state at a given slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelState {
    Good,
    Bad,
}

/// A single wireless path modeled as a two-state discrete-time Markov chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilbertElliottChannel {
    p_stay_good: f64,
    p_stay_bad: f64,
}

/// Long-run state occupancy of an ergodic chain.
///
/// `pi_bad` equals the single-path stationary packet-loss rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryDistribution {
    pub pi_good: f64,
    pub pi_bad: f64,
}

/// Distribution of the number of erased slots in a window of `window`
/// consecutive transmissions: `mass[l]` is the probability of exactly `l`
/// losses.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPmf {
    window: usize,
    mass: Vec<f64>,
}

impl LossPmf {
    /// A point mass at zero losses over an empty window. Acts as the
    /// identity for [`LossPmf::convolve`].
    pub fn empty() -> Self {
        LossPmf { window: 0, mass: vec![1.0] }
    }

    pub fn from_mass(window: usize, mass: Vec<f64>) -> Self {
        assert_eq!(mass.len(), window + 1, "mass must have window+1 entries");
        LossPmf { window, mass }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Expected number of losses in the window.
    pub fn mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }

    /// Distribution of the total loss count when this window and `other`
    /// are transmitted on independent channels.
    pub fn convolve(&self, other: &LossPmf) -> LossPmf {
        let n = self.window + other.window;
        let mut mass = vec![0.0; n + 1];
        for (l1, p1) in self.mass.iter().enumerate() {
            for (l2, p2) in other.mass.iter().enumerate() {
                mass[l1 + l2] += p1 * p2;
            }
        }
        LossPmf { window: n, mass }
    }
}

fn check_probability(field: &'static str, value: f64) -> Result<f64, ChannelError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ChannelError::InvalidProbability { field, value });
    }
    Ok(value)
}

impl GilbertElliottChannel {
    pub fn new(p_stay_good: f64, p_stay_bad: f64) -> Result<Self, ChannelError> {
        Ok(GilbertElliottChannel {
            p_stay_good: check_probability("p_stay_good", p_stay_good)?,
            p_stay_bad: check_probability("p_stay_bad", p_stay_bad)?,
        })
    }

    pub fn p_stay_good(&self) -> f64 {
        self.p_stay_good
    }

    pub fn p_stay_bad(&self) -> f64 {
        self.p_stay_bad
    }

    /// A chain with an absorbing state has degenerate long-run behavior;
    /// analytics are still defined unless both states absorb.
    pub fn is_ergodic(&self) -> bool {
        self.p_stay_good < 1.0 && self.p_stay_bad < 1.0
    }

    /// Unique solution of `pi * T = pi`.
    ///
    /// Fails only when both states are absorbing, in which case any initial
    /// mixture is stationary and there is nothing unique to return.
    pub fn stationary(&self) -> Result<StationaryDistribution, ChannelError> {
        let (g, b) = (self.p_stay_good, self.p_stay_bad);
        if g == 1.0 && b == 1.0 {
            return Err(ChannelError::DegenerateChain);
        }
        let denom = 2.0 - g - b;
        Ok(StationaryDistribution {
            pi_good: (1.0 - b) / denom,
            pi_bad: (1.0 - g) / denom,
        })
    }

    /// Exact distribution of the loss count over `window` consecutive
    /// slots, with the initial state drawn from the stationary
    /// distribution.
    ///
    /// Dynamic programming over (slot, state, loss count); no
    /// approximation.
    pub fn loss_pmf(&self, window: usize) -> Result<LossPmf, ChannelError> {
        let start = self.stationary()?;
        self.loss_pmf_with_start(window, start.pi_bad)
    }

    /// Same as [`loss_pmf`](Self::loss_pmf) but starting from a fixed
    /// state instead of the stationary mixture.
    pub fn loss_pmf_from(&self, window: usize, initial: ChannelState) -> Result<LossPmf, ChannelError> {
        let p_bad_start = match initial {
            ChannelState::Good => 0.0,
            ChannelState::Bad => 1.0,
        };
        self.loss_pmf_with_start(window, p_bad_start)
    }

    fn loss_pmf_with_start(&self, window: usize, p_bad_start: f64) -> Result<LossPmf, ChannelError> {
        if window == 0 {
            return Err(ChannelError::EmptyWindow);
        }
        let (g, b) = (self.p_stay_good, self.p_stay_bad);
        let n = window;
        // good[l] / bad[l]: probability of l losses so far with the chain
        // currently in the given state. A slot spent in the bad state is an
        // erasure; transitions happen between consecutive slots.
        let mut good = vec![0.0; n + 1];
        let mut bad = vec![0.0; n + 1];
        good[0] = 1.0 - p_bad_start;
        bad[1] = p_bad_start;
        for _ in 1..n {
            let mut next_good = vec![0.0; n + 1];
            let mut next_bad = vec![0.0; n + 1];
            for l in 0..n {
                next_good[l] += good[l] * g + bad[l] * (1.0 - b);
                next_bad[l + 1] += good[l] * (1.0 - g) + bad[l] * b;
            }
            next_good[n] += good[n] * g + bad[n] * (1.0 - b);
            good = next_good;
            bad = next_bad;
        }
        let mass = good.iter().zip(&bad).map(|(a, c)| a + c).collect();
        Ok(LossPmf { window: n, mass })
    }

    /// Deterministic erasure sample path: bit `i` is true iff slot `i` is
    /// an erasure. The initial state is sampled from the stationary
    /// distribution using the seeded stream; a doubly-absorbing chain
    /// starts in either state with equal probability.
    pub fn sample_path(&self, length: usize, seed: u64) -> Vec<bool> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let p_bad_start = match self.stationary() {
            Ok(st) => st.pi_bad,
            Err(_) => 0.5,
        };
        let mut state = if rng.random::<f64>() < p_bad_start {
            ChannelState::Bad
        } else {
            ChannelState::Good
        };
        let mut bits = Vec::with_capacity(length);
        for _ in 0..length {
            bits.push(state == ChannelState::Bad);
            state = self.step(state, &mut rng);
        }
        bits
    }

    /// Advance the chain by one slot.
    pub fn step<R: Rng + ?Sized>(&self, state: ChannelState, rng: &mut R) -> ChannelState {
        let stay = match state {
            ChannelState::Good => self.p_stay_good,
            ChannelState::Bad => self.p_stay_bad,
        };
        if rng.random::<f64>() < stay {
            state
        } else {
            match state {
                ChannelState::Good => ChannelState::Bad,
                ChannelState::Bad => ChannelState::Good,
            }
        }
    }

    /// Draw an initial state from the stationary distribution.
    pub fn stationary_state<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelState {
        let p_bad = match self.stationary() {
            Ok(st) => st.pi_bad,
            Err(_) => 0.5,
        };
        if rng.random::<f64>() < p_bad {
            ChannelState::Bad
        } else {
            ChannelState::Good
        }
    }

    /// Reverse-fit an ergodic channel from two observable targets: the
    /// stationary loss rate and the probability of a loss-free window of
    /// `window` slots.
    ///
    /// With `p = pi_bad` fixed, `p_stay_bad` is eliminated through the
    /// stationary constraint, leaving the zero-loss probability
    /// `(1 - p) * g^(window-1)` strictly increasing in `g`; a monotone
    /// bisection pins `g` to within [`CALIBRATION_TOL`].
    pub fn calibrate(
        pi_bad_target: f64,
        zero_loss_prob_target: f64,
        window: usize,
    ) -> Result<Self, ChannelError> {
        let p = pi_bad_target;
        let z = zero_loss_prob_target;
        if !(p > 0.0 && p < 1.0) {
            return Err(ChannelError::Infeasible(format!(
                "pi_bad target {p} must lie strictly inside (0, 1)"
            )));
        }
        if window < 2 {
            return Err(ChannelError::Infeasible(
                "calibration window must be >= 2".into(),
            ));
        }
        // p_stay_bad = 2 - g - (1 - g)/p stays in [0, 1) for g in [g_lo, 1).
        let g_lo = ((1.0 - 2.0 * p) / (1.0 - p)).max(0.0);
        let zero_loss = |g: f64| (1.0 - p) * g.powi(window as i32 - 1);
        if !(z >= zero_loss(g_lo) && z < 1.0 - p) {
            return Err(ChannelError::Infeasible(format!(
                "zero-loss target {z} outside feasible range [{}, {})",
                zero_loss(g_lo),
                1.0 - p
            )));
        }
        let (mut lo, mut hi) = (g_lo, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if zero_loss(mid) < z {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        let g = 0.5 * (lo + hi);
        let b = 2.0 - g - (1.0 - g) / p;
        let channel = GilbertElliottChannel::new(g, b.clamp(0.0, 1.0))?;
        let st = channel.stationary()?;
        let achieved_z = zero_loss(g);
        if (st.pi_bad - p).abs() > CALIBRATION_TOL || (achieved_z - z).abs() > CALIBRATION_TOL {
            return Err(ChannelError::Infeasible(format!(
                "bisection did not converge: pi_bad {} vs {p}, zero-loss {achieved_z} vs {z}",
                st.pi_bad
            )));
        }
        Ok(channel)
    }
}
