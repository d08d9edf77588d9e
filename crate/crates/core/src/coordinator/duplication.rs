use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::coordinator::{
    ceil_log2, salts, Diagnostics, Message, ParamsEcho, Phase, ProtocolResult, SimNetwork,
};
use crate::error::{Error, Result};
use crate::sampling::mix64;

/// Tunable constants of duplication estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DuplicationParams {
    pub eps: f64,
    /// Target number of duplicates `C`.
    pub c_budget: u64,
    /// Bit-vector width constant: `ceil(ξ α s / (C ε²))` positions.
    pub xi: f64,
    /// Universe sampling constant: `p = min(1, κ / (C ε²))`.
    pub sample_constant: f64,
    pub max_iters: u32,
}

impl DuplicationParams {
    pub const DEFAULT_XI: f64 = 32.0;
    pub const DEFAULT_SAMPLE_CONSTANT: f64 = 4.0;
    pub const DEFAULT_MAX_ITERS: u32 = 64;
    /// Smallest bit vector used.
    pub const MIN_WIDTH: u64 = 16;

    pub fn new(eps: f64, c_budget: u64) -> Self {
        Self {
            eps,
            c_budget,
            xi: Self::DEFAULT_XI,
            sample_constant: Self::DEFAULT_SAMPLE_CONSTANT,
            max_iters: Self::DEFAULT_MAX_ITERS,
        }
    }

    pub fn sample_rate(&self) -> f64 {
        (self.sample_constant / (self.c_budget as f64 * self.eps * self.eps)).min(1.0)
    }

    pub fn width(&self, alpha: usize, max_shard_len: usize) -> u64 {
        let w = self.xi * alpha as f64 * max_shard_len as f64
            / (self.c_budget as f64 * self.eps * self.eps);
        (w.ceil() as u64).max(Self::MIN_WIDTH)
    }
}

/// Estimates the number `D` of items held by at least two players.
///
/// Players restrict their shards to a public subsample `U` of rate `p`. Each
/// iteration they hash their surviving items into a fresh bit vector and
/// send the set non-zero positions. Positions reported by a single player
/// cannot hold a duplicate, so the coordinator sends back the positions
/// reported by several players and every player drops the items outside
/// them. The loop ends once no position holds two distinct surviving items;
/// then each multiply-reported position is exactly one duplicate, and the
/// output is `D' / p` for `D'` the number of such positions.
///
/// The loop guard inspects the surviving items directly and is not charged.
/// If `max_iters` iterations pass without reaching the fixpoint, the last
/// iteration's count is returned with `terminated = false`.
pub fn duplication_estimate(
    mut net: SimNetwork<'_>,
    params: DuplicationParams,
) -> Result<ProtocolResult> {
    if !(params.eps > 0.0 && params.eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1], got {}",
            params.eps
        )));
    }
    if params.c_budget == 0 {
        return Err(Error::InvalidParameter("c_budget must be at least 1".into()));
    }
    if params.max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    if params.xi <= 0.0 || params.sample_constant <= 0.0 {
        return Err(Error::InvalidParameter(
            "xi and the sampling constant must be positive".into(),
        ));
    }
    let seed = net.sampler().seed().seed;
    let p = params.sample_rate();
    let width = params.width(net.alpha(), net.max_shard_len());
    let index_bits = ceil_log2(width);
    let universe = net.sampler().with_salt(salts::DUP_UNIVERSE);

    // Local step, no communication: T_i = S_i ∩ U.
    let mut survivors: Vec<Vec<u64>> = vec![Vec::new(); net.alpha()];
    net.local(&mut survivors, |view, items| {
        items.extend(
            view.shard()
                .items()
                .iter()
                .copied()
                .filter(|&j| universe.in_bernoulli(j, p, 0)),
        );
    });
    if net.max_shard_len() == 0 {
        return Err(Error::EmptyDataset);
    }

    let mut iterations = 0;
    let mut terminated = false;
    let mut duplicates = 0u64;
    while iterations < params.max_iters {
        iterations += 1;
        let salt = salts::DUP_POSITION ^ mix64(iterations as u64);
        let hasher = net.sampler().with_salt(salt);
        let position = |j: u64| hasher.bucket(j, width, 0);

        let inbox = net.gather_with(Phase::Duplication, &mut survivors, |_, items| {
            let mut pos: Vec<u64> = items.iter().map(|&j| position(j)).collect();
            pos.sort_unstable();
            pos.dedup();
            (!pos.is_empty()).then_some(Message::Positions {
                positions: pos,
                index_bits,
            })
        });
        let mut reporters: BTreeMap<u64, u32> = BTreeMap::new();
        for (_, msg) in &inbox {
            if let Message::Positions { positions, .. } = msg {
                for &q in positions {
                    *reporters.entry(q).or_insert(0) += 1;
                }
            }
        }
        let shared: Vec<u64> = reporters
            .iter()
            .filter(|(_, &c)| c >= 2)
            .map(|(&q, _)| q)
            .collect();
        duplicates = shared.len() as u64;

        if !has_distinct_collision(&survivors, &position) {
            terminated = true;
            break;
        }
        if iterations == params.max_iters {
            break;
        }
        net.broadcast(
            Phase::Duplication,
            &Message::Positions {
                positions: shared.clone(),
                index_bits,
            },
        );
        let keep: HashSet<u64> = shared.into_iter().collect();
        net.local(&mut survivors, |_, items| {
            items.retain(|&j| keep.contains(&position(j)));
        });
    }

    let rounds = net.rounds();
    let ledger = net.into_ledger();
    Ok(ProtocolResult {
        estimate: duplicates as f64 / p,
        bits_used: ledger.total_bits(),
        rounds,
        level_used: 0,
        iterations,
        terminated,
        params: ParamsEcho {
            eps: Some(params.eps),
            c_budget: Some(params.c_budget),
            seed,
        },
        diagnostics: Diagnostics {
            sample_rate: Some(p),
            sample_excess: Some(duplicates),
            ..Diagnostics::default()
        },
        ledger,
    })
}

/// True when two distinct surviving items share a position.
fn has_distinct_collision(survivors: &[Vec<u64>], position: &impl Fn(u64) -> u64) -> bool {
    let mut owner: HashMap<u64, u64> = HashMap::new();
    for items in survivors {
        for &j in items {
            match owner.entry(position(j)) {
                Entry::Occupied(e) => {
                    if *e.get() != j {
                        return true;
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(j);
                }
            }
        }
    }
    false
}
