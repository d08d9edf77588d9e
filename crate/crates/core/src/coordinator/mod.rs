//! Distributed distinct-element protocols in the coordinator model.
//!
//! Four protocols run over a [`SimNetwork`]:
//!
//! * [`constant_factor_f0`]: a 4-approximation by descending nested level sets
//!   until the coordinator has seen `Θ(log log n)` distinct items.
//! * [`eps_approx_f0`]: a `(1 ± ε)` estimate whose cost grows with the square
//!   root of the collision count.
//! * [`collision_bounded_f0`]: given a promise `C` on pairwise collisions,
//!   estimates `F1` of a level exactly and subtracts a subsampled
//!   estimate of the excess mass.
//! * [`duplication_estimate`]: estimates the number of items held by at least
//!   two players.
//!
//! Independent steps draw on independent public randomness by using distinct
//! salts (see [`salts`]).

mod distinct;
mod duplication;
mod ledger;
mod network;

pub use distinct::{
    collision_bounded_f0, constant_factor_f0, constant_factor_threshold, eps_approx_f0,
    sample_level, SAMPLE_CONSTANT,
};
pub use duplication::{duplication_estimate, DuplicationParams};
pub use ledger::{
    ceil_log2, CommLedger, CostModel, Direction, LedgerEntry, Message, Phase,
};
pub use network::{PlayerView, SimNetwork};

/// Domain-separation salts of the independent random sources.
pub mod salts {
    /// Level descent of the constant-factor estimate.
    pub const CONSTANT_FACTOR: u64 = 0x0001;
    /// Level set used for the final sample.
    pub const LEVEL: u64 = 0x0002;
    /// Second-stage Bernoulli subsample of the excess-mass estimator.
    pub const EXCESS: u64 = 0x0003;
    /// Subsampled universe of duplication estimation.
    pub const DUP_UNIVERSE: u64 = 0x0004;
    /// Position hashes of duplication estimation; xor-ed with the iteration.
    pub const DUP_POSITION: u64 = 0x0100_0000;
}

/// Bits of a control word announcing a level (`0..=64`).
pub const LEVEL_WORD_BITS: u32 = 7;

/// Parameters a run was invoked with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsEcho {
    pub eps: Option<f64>,
    pub c_budget: Option<u64>,
    pub seed: u64,
}

/// Intermediate quantities, kept for diagnostics and tests.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Constant-factor estimate `X`.
    pub constant_factor: Option<f64>,
    /// `Σ_players |shard ∩ S_i|`, the level's `F1`.
    pub level_f1: Option<u64>,
    /// Distinct items received from the final level set.
    pub level_distinct: Option<u64>,
    /// Sampling rate of the second stage.
    pub sample_rate: Option<f64>,
    /// Unscaled excess mass `W` or duplicate count `D'` observed in the sample.
    pub sample_excess: Option<u64>,
}

/// Outcome of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    pub estimate: f64,
    pub bits_used: u64,
    pub rounds: u32,
    /// Final level `i` (sampling probability `2^-i`).
    pub level_used: u32,
    /// Hash-and-prune iterations (duplication estimation only).
    pub iterations: u32,
    /// False when duplication estimation hit its iteration cap.
    pub terminated: bool,
    pub params: ParamsEcho,
    pub diagnostics: Diagnostics,
    pub ledger: CommLedger,
}
