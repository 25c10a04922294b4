//! Analytics for dual-connectivity traffic scheduling over two independent
//! bursty erasure channels.
//!
//! A wireless path is modeled as a two-state Markov chain (`channel`), and
//! the end-to-end packet-loss rate of four scheduling policies — packet
//! duplication, packet splitting, their mix, and random linear network
//! coding — is computed in closed form (`strategy`), backed by finite-field
//! rank mathematics (`gf`) and cross-checked by a Monte-Carlo engine
//! (`sim`). The `config`/`sweep`/`calibrate` modules drive grid evaluations
//! and reverse-fit channel parameters from published loss tables.

pub mod calibrate;
pub mod channel;
pub mod config;
pub mod gf;
pub mod sim;
pub mod strategy;
pub mod sweep;
pub mod tables;

pub use channel::{ChannelError, GilbertElliottChannel, LossPmf, StationaryDistribution};
pub use gf::{FieldSpec, GfError, GfMatrix};
pub use sim::{SimConfig, SimResult};
pub use strategy::{NcMode, PathPair, PolicyReport, SchedulingPolicy, StrategyError};
