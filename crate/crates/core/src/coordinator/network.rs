//! Synchronous star network: `alpha` players, one coordinator.
//!
//! A player can only compute a message from its own shard, its own local
//! state and the shared public randomness, and the only way to emit it is
//! back to the coordinator through [`SimNetwork::gather`]. No method takes a
//! destination player for a player-originated message, so player-to-player
//! traffic cannot be expressed:
//!
//! ```compile_fail
//! use pairwise_f0::coordinator::{Message, Phase, SimNetwork};
//! use pairwise_f0::model::Dataset;
//!
//! let d = Dataset::new(4, vec![vec![1u64], vec![2]]).unwrap();
//! let mut net = SimNetwork::new(&d, 1);
//! net.send_between(0, 1, Phase::Sample, Message::Items(vec![1]));
//! ```
//!
//! Rounds are synchronous. A player with nothing to say stays silent and is
//! not charged; silence is observable by the coordinator at no cost.

use crate::coordinator::ledger::{CommLedger, CostModel, Direction, Message, Phase};
use crate::model::{f1_exact, Dataset, ShardVector};
use crate::sampling::{LevelSampler, SamplerSeed};

/// What one player can see while composing a message.
pub struct PlayerView<'a> {
    id: usize,
    shard: &'a ShardVector,
    sampler: &'a LevelSampler,
}

impl<'a> PlayerView<'a> {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn shard(&self) -> &'a ShardVector {
        self.shard
    }

    /// Public randomness, identical on all players.
    pub fn sampler(&self) -> &'a LevelSampler {
        self.sampler
    }
}

/// Simulated coordinator model over a borrowed dataset.
pub struct SimNetwork<'a> {
    players: &'a [ShardVector],
    universe_size: u64,
    max_shard_len: usize,
    sampler: LevelSampler,
    ledger: CommLedger,
    round: u32,
}

impl<'a> SimNetwork<'a> {
    /// Players hold the shards of `dataset`; public randomness comes from `seed`.
    pub fn new(dataset: &'a Dataset, seed: u64) -> Self {
        let n = dataset.universe_size();
        Self {
            players: dataset.shards(),
            universe_size: n,
            max_shard_len: dataset.max_shard_len(),
            sampler: LevelSampler::new(SamplerSeed::new(seed, 0), n),
            ledger: CommLedger::new(CostModel::new(n, f1_exact(dataset))),
            round: 0,
        }
    }

    pub fn alpha(&self) -> usize {
        self.players.len()
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    /// Public bound `s` on any player's shard size.
    pub fn max_shard_len(&self) -> usize {
        self.max_shard_len
    }

    pub fn sampler(&self) -> &LevelSampler {
        &self.sampler
    }

    pub fn ledger(&self) -> &CommLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> CommLedger {
        self.ledger
    }

    /// Communication rounds elapsed so far, silent ones included.
    pub fn rounds(&self) -> u32 {
        self.round
    }

    /// Every player may send one message to the coordinator. Returns
    /// `(player, message)` for the players that spoke, in player order.
    pub fn gather(
        &mut self,
        phase: Phase,
        mut compose: impl FnMut(&PlayerView<'_>) -> Option<Message>,
    ) -> Vec<(usize, Message)> {
        let mut unit = vec![(); self.players.len()];
        self.gather_with(phase, &mut unit, |view, _| compose(view))
    }

    /// As [`SimNetwork::gather`], with a mutable per-player local state;
    /// each player sees only its own slot.
    pub fn gather_with<S>(
        &mut self,
        phase: Phase,
        states: &mut [S],
        mut compose: impl FnMut(&PlayerView<'_>, &mut S) -> Option<Message>,
    ) -> Vec<(usize, Message)> {
        assert_eq!(states.len(), self.players.len(), "one state per player");
        let round = self.next_round();
        let mut inbox = Vec::new();
        for (id, (shard, state)) in self.players.iter().zip(states.iter_mut()).enumerate() {
            let view = PlayerView {
                id,
                shard,
                sampler: &self.sampler,
            };
            if let Some(msg) = compose(&view, state) {
                self.ledger
                    .charge(round, Direction::ToCoordinator, id, phase, &msg);
                inbox.push((id, msg));
            }
        }
        inbox
    }

    /// Local computation on every player; nothing is sent or charged.
    pub fn local<S>(&self, states: &mut [S], mut step: impl FnMut(&PlayerView<'_>, &mut S)) {
        assert_eq!(states.len(), self.players.len(), "one state per player");
        for (id, (shard, state)) in self.players.iter().zip(states.iter_mut()).enumerate() {
            let view = PlayerView {
                id,
                shard,
                sampler: &self.sampler,
            };
            step(&view, state);
        }
    }

    /// Coordinator sends the same message to every player over the private
    /// channels, one charge per player.
    pub fn broadcast(&mut self, phase: Phase, msg: &Message) {
        let round = self.next_round();
        for id in 0..self.players.len() {
            self.ledger.charge(round, Direction::ToPlayer, id, phase, msg);
        }
    }

    fn next_round(&mut self) -> u32 {
        let r = self.round;
        self.round += 1;
        r
    }
}
