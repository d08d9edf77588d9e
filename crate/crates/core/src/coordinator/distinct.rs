use std::collections::{HashMap, HashSet};

use crate::coordinator::{
    salts, Diagnostics, Message, ParamsEcho, Phase, ProtocolResult, SimNetwork, LEVEL_WORD_BITS,
};
use crate::error::{Error, Result};

/// Numerator of the target sample size `SAMPLE_CONSTANT / ε²`.
pub const SAMPLE_CONSTANT: f64 = 1000.0;

/// Distinct items the coordinator must see before the descent stops:
/// `max(32, ceil(8 · log2(log2(n) + 2)))`.
pub fn constant_factor_threshold(universe_size: u64) -> usize {
    let n = universe_size.max(1) as f64;
    let t = (8.0 * (n.log2() + 2.0).log2()).ceil() as usize;
    t.max(32)
}

/// Largest `i >= 0` with `x / 2^i > SAMPLE_CONSTANT / ε²`, or 0 if none.
pub fn sample_level(x: f64, eps: f64) -> u32 {
    let target = SAMPLE_CONSTANT / (eps * eps);
    let mut i = 0u32;
    if x <= target {
        return 0;
    }
    while i < 64 && x / 2f64.powi(i as i32 + 1) > target {
        i += 1;
    }
    i
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1], got {eps}"
        )))
    }
}

fn items_message(items: Vec<u64>) -> Option<Message> {
    (!items.is_empty()).then_some(Message::Items(items))
}

/// Descends levels `ceil(log2 n), ..., 0` of the constant-factor level sets.
/// In the round for level `i` each player sends the ids of `S_i` it has not
/// sent yet; the coordinator keeps the union and stops the descent once it
/// holds `τ` distinct ids or level 0 is done. Returns `(X, i)` with
/// `X = |union| · 2^i`. The stop instruction is left to the caller.
fn descend(net: &mut SimNetwork<'_>) -> Result<(f64, u32)> {
    let sampler = net.sampler().with_salt(salts::CONSTANT_FACTOR);
    let n = net.universe_size();
    let top = 64 - n.saturating_sub(1).leading_zeros();
    let tau = constant_factor_threshold(n);
    let mut seen: HashSet<u64> = HashSet::new();
    for level in (0..=top).rev() {
        let inbox = net.gather(Phase::ConstantFactor, |p| {
            let fresh = p
                .shard()
                .items()
                .iter()
                .copied()
                .filter(|&j| {
                    let deepest = sampler.max_level(j);
                    if level == top {
                        deepest >= level
                    } else {
                        deepest == level
                    }
                })
                .collect();
            items_message(fresh)
        });
        for (_, msg) in inbox {
            if let Message::Items(items) = msg {
                seen.extend(items);
            }
        }
        if seen.len() >= tau || level == 0 {
            if seen.is_empty() {
                return Err(Error::EmptyDataset);
            }
            return Ok((seen.len() as f64 * 2f64.powi(level as i32), level));
        }
    }
    unreachable!("the descent always ends at level 0")
}

fn finish(
    net: SimNetwork<'_>,
    estimate: f64,
    level_used: u32,
    params: ParamsEcho,
    diagnostics: Diagnostics,
) -> ProtocolResult {
    let rounds = net.rounds();
    let ledger = net.into_ledger();
    ProtocolResult {
        estimate,
        bits_used: ledger.total_bits(),
        rounds,
        level_used,
        iterations: 0,
        terminated: true,
        params,
        diagnostics,
        ledger,
    }
}

/// 4-approximation to `F0` using `O(α log n)` header bits plus
/// `O(log log n · log n)` item bits.
pub fn constant_factor_f0(mut net: SimNetwork<'_>) -> Result<ProtocolResult> {
    let seed = net.sampler().seed().seed;
    let (x, level) = descend(&mut net)?;
    net.broadcast(Phase::Control, &Message::Control { bits: LEVEL_WORD_BITS });
    Ok(finish(
        net,
        x,
        level,
        ParamsEcho {
            eps: None,
            c_budget: None,
            seed,
        },
        Diagnostics {
            constant_factor: Some(x),
            ..Diagnostics::default()
        },
    ))
}

/// `(1 ± ε)`-approximation to `F0`.
///
/// After the constant-factor estimate `X`, the coordinator announces the level
/// `i = max(0, i0)` where `i0` is the largest integer with
/// `X / 2^i0 > 1000 / ε²`. Every player sends its ids in `S_i` and the
/// coordinator returns `Z · 2^i` for `Z` the number of distinct ids received.
pub fn eps_approx_f0(mut net: SimNetwork<'_>, eps: f64) -> Result<ProtocolResult> {
    check_eps(eps)?;
    let seed = net.sampler().seed().seed;
    let (x, _) = descend(&mut net)?;
    let level = sample_level(x, eps);
    net.broadcast(Phase::Control, &Message::Control { bits: LEVEL_WORD_BITS });

    let sampler = net.sampler().with_salt(salts::LEVEL);
    let inbox = net.gather(Phase::Sample, |p| {
        items_message(
            p.shard()
                .items()
                .iter()
                .copied()
                .filter(|&j| sampler.in_level(j, level))
                .collect(),
        )
    });
    let mut union: HashSet<u64> = HashSet::new();
    for (_, msg) in inbox {
        if let Message::Items(items) = msg {
            union.extend(items);
        }
    }
    let z = union.len() as u64;
    let estimate = z as f64 * 2f64.powi(level as i32);
    Ok(finish(
        net,
        estimate,
        level,
        ParamsEcho {
            eps: Some(eps),
            c_budget: None,
            seed,
        },
        Diagnostics {
            constant_factor: Some(x),
            level_distinct: Some(z),
            ..Diagnostics::default()
        },
    ))
}

/// `(1 ± ε)`-approximation to `F0` under the promise of at most `c_budget`
/// pairwise collisions.
///
/// Players report `|shard ∩ S_i|`, whose sum `Z` is the level's `F1`. The
/// excess mass of the level is estimated from a Bernoulli(`p`) subsample `T`
/// of `S_i` with `p = min(1, 100 C / (η² X²))`, `η = ε / 10`: players send
/// their ids in `T`, the coordinator counts `W = Σ_{j ∈ T} max(0, H_j − 1)`
/// and returns `Z · 2^i − W / p`.
pub fn collision_bounded_f0(
    mut net: SimNetwork<'_>,
    eps: f64,
    c_budget: u64,
) -> Result<ProtocolResult> {
    check_eps(eps)?;
    let seed = net.sampler().seed().seed;
    let (x, _) = descend(&mut net)?;
    let level = sample_level(x, eps);
    let eta = eps / 10.0;
    let p = if c_budget == 0 {
        0.0
    } else {
        (100.0 * c_budget as f64 / (eta * eta * x * x)).min(1.0)
    };
    // Level word plus the sampling rate as an f64.
    net.broadcast(
        Phase::Control,
        &Message::Control {
            bits: LEVEL_WORD_BITS + 64,
        },
    );

    let sampler = net.sampler().with_salt(salts::LEVEL);
    let counts = net.gather(Phase::LevelCount, |pv| {
        let c = pv
            .shard()
            .items()
            .iter()
            .filter(|&&j| sampler.in_level(j, level))
            .count() as u64;
        (c > 0).then_some(Message::Count(c))
    });
    let z: u64 = counts
        .iter()
        .map(|(_, m)| match m {
            Message::Count(c) => *c,
            _ => 0,
        })
        .sum();

    let mut w = 0u64;
    if p > 0.0 {
        let inbox = net.gather(Phase::ExcessSample, |pv| {
            items_message(
                pv.shard()
                    .items()
                    .iter()
                    .copied()
                    .filter(|&j| {
                        sampler.in_level(j, level) && sampler.in_bernoulli(j, p, salts::EXCESS)
                    })
                    .collect(),
            )
        });
        let mut holders: HashMap<u64, u64> = HashMap::new();
        for (_, msg) in inbox {
            if let Message::Items(items) = msg {
                for j in items {
                    *holders.entry(j).or_insert(0) += 1;
                }
            }
        }
        w = holders.values().map(|h| h - 1).sum();
    }
    let excess = if p > 0.0 { w as f64 / p } else { 0.0 };
    let estimate = z as f64 * 2f64.powi(level as i32) - excess;
    Ok(finish(
        net,
        estimate,
        level,
        ParamsEcho {
            eps: Some(eps),
            c_budget: Some(c_budget),
            seed,
        },
        Diagnostics {
            constant_factor: Some(x),
            level_f1: Some(z),
            sample_rate: Some(p),
            sample_excess: Some(w),
            ..Diagnostics::default()
        },
    ))
}
