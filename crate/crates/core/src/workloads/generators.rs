use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Dataset;

/// Zipfian replication: the item of rank `i` lives on `round(C_z / i^s)`
/// players, clamped to `[1, α]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZipfSpec {
    pub exponent: f64,
    pub scale: f64,
    /// Number of distinct items.
    pub support: u64,
    pub seed: u64,
}

/// `collisions_target` items on exactly two players, the rest on one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlantedSpec {
    pub f0_target: u64,
    pub collisions_target: u64,
    pub alpha: usize,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct ids from `[0, n)` in random order.
fn random_ids(rng: &mut ChaCha8Rng, n: u64, count: u64) -> Result<Vec<u64>> {
    if count > n {
        return Err(Error::InvalidSpec(format!(
            "{count} distinct items do not fit in a universe of size {n}"
        )));
    }
    if n <= u32::MAX as u64 {
        Ok(index::sample(rng, n as usize, count as usize)
            .into_iter()
            .map(|j| j as u64)
            .collect())
    } else {
        // Rejection sampling; count is tiny next to n here.
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(count as usize);
        while (out.len() as u64) < count {
            let j = rand::Rng::gen_range(rng, 0..n);
            if seen.insert(j) {
                out.push(j);
            }
        }
        Ok(out)
    }
}

/// Places each `(id, replication)` pair on that many distinct random players.
fn scatter(
    rng: &mut ChaCha8Rng,
    n: u64,
    alpha: usize,
    items: impl IntoIterator<Item = (u64, usize)>,
) -> Result<Dataset> {
    let mut shards = vec![Vec::new(); alpha];
    let mut players: Vec<usize> = (0..alpha).collect();
    for (j, r) in items {
        let (chosen, _) = players.partial_shuffle(rng, r);
        for &p in chosen.iter() {
            shards[p].push(j);
        }
    }
    Dataset::new(n, shards)
}

fn check_alpha(alpha: usize) -> Result<()> {
    if alpha == 0 {
        Err(Error::InvalidSpec("alpha must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `round_half_up(scale / rank^s)` clamped to `[1, alpha]`.
pub fn replication_count(scale: f64, exponent: f64, rank: u64, alpha: usize) -> usize {
    let x = scale / (rank as f64).powf(exponent);
    let r = (x + 0.5).floor();
    if r.is_nan() || r < 1.0 {
        1
    } else {
        (r as usize).min(alpha)
    }
}

pub fn gen_zipfian_dataset(z: &ZipfSpec, alpha: usize, n: u64) -> Result<Dataset> {
    check_alpha(alpha)?;
    if !(z.exponent > 0.0 && z.scale > 0.0) {
        return Err(Error::InvalidSpec(
            "zipf exponent and scale must be positive".into(),
        ));
    }
    let mut rng = rng(z.seed);
    let ids = random_ids(&mut rng, n, z.support)?;
    let items: Vec<(u64, usize)> = ids
        .into_iter()
        .enumerate()
        .map(|(i, j)| (j, replication_count(z.scale, z.exponent, i as u64 + 1, alpha)))
        .collect();
    scatter(&mut rng, n, alpha, items)
}

pub fn gen_planted(spec: &PlantedSpec, n: u64, seed: u64) -> Result<Dataset> {
    check_alpha(spec.alpha)?;
    if spec.collisions_target > spec.f0_target {
        return Err(Error::InvalidSpec(
            "collisions_target cannot exceed f0_target".into(),
        ));
    }
    if spec.collisions_target > 0 && spec.alpha < 2 {
        return Err(Error::InvalidSpec(
            "planting collisions needs at least two players".into(),
        ));
    }
    let mut rng = rng(seed);
    let ids = random_ids(&mut rng, n, spec.f0_target)?;
    let c = spec.collisions_target as usize;
    let items: Vec<(u64, usize)> = ids
        .into_iter()
        .enumerate()
        .map(|(k, j)| (j, if k < c { 2 } else { 1 }))
        .collect();
    scatter(&mut rng, n, spec.alpha, items)
}

/// `f0` items each on one uniformly random player.
pub fn gen_uniform(f0: u64, alpha: usize, n: u64, seed: u64) -> Result<Dataset> {
    check_alpha(alpha)?;
    let mut rng = rng(seed);
    let ids = random_ids(&mut rng, n, f0)?;
    scatter(&mut rng, n, alpha, ids.into_iter().map(|j| (j, 1)))
}

fn binom2(h: u64) -> u64 {
    h * h.saturating_sub(1) / 2
}

/// `f0` items replicated `h` or `h + 1` times so that the pairwise collision
/// count is as close to `collisions_target` as the two multiplicities allow.
pub fn gen_replicated(
    f0: u64,
    collisions_target: u64,
    alpha: usize,
    n: u64,
    seed: u64,
) -> Result<Dataset> {
    check_alpha(alpha)?;
    if f0 == 0 {
        return Err(Error::InvalidSpec("f0 must be positive".into()));
    }
    // Largest h with f0 · binom(h, 2) <= target.
    let mut h = 1u64;
    while f0 * binom2(h + 1) <= collisions_target {
        h += 1;
    }
    let step = binom2(h + 1) - binom2(h);
    let rest = collisions_target - f0 * binom2(h);
    let upgraded = ((rest as f64 / step as f64).round() as u64).min(f0);
    let top = if upgraded > 0 { h + 1 } else { h };
    if top as usize > alpha {
        return Err(Error::InvalidSpec(format!(
            "collision target needs multiplicity {top} but alpha is {alpha}"
        )));
    }
    let mut rng = rng(seed);
    let ids = random_ids(&mut rng, n, f0)?;
    let items: Vec<(u64, usize)> = ids
        .into_iter()
        .enumerate()
        .map(|(k, j)| (j, if (k as u64) < upgraded { h + 1 } else { h } as usize))
        .collect();
    scatter(&mut rng, n, alpha, items)
}

/// `α` shards of exactly `shard_size` items, `d` of which are shared by two
/// players. Shared item `k` goes to players `2k mod α` and `2k + 1 mod α`.
pub fn gen_duplicates(
    alpha: usize,
    shard_size: usize,
    d: u64,
    n: u64,
    seed: u64,
) -> Result<Dataset> {
    if alpha < 2 {
        return Err(Error::InvalidSpec("duplicates need at least two players".into()));
    }
    let mut load = vec![0usize; alpha];
    let mut pairs = Vec::with_capacity(d as usize);
    for k in 0..d as usize {
        let (a, b) = ((2 * k) % alpha, (2 * k + 1) % alpha);
        load[a] += 1;
        load[b] += 1;
        pairs.push((a, b));
    }
    if load.iter().any(|&l| l > shard_size) {
        return Err(Error::InvalidSpec(format!(
            "{d} shared items do not fit in shards of size {shard_size}"
        )));
    }
    let singles: usize = load.iter().map(|&l| shard_size - l).sum();
    let mut rng = rng(seed);
    let ids = random_ids(&mut rng, n, d + singles as u64)?;
    let mut next = ids.into_iter();
    let mut shards = vec![Vec::with_capacity(shard_size); alpha];
    for (a, b) in pairs {
        let j = next.next().expect("enough ids");
        shards[a].push(j);
        shards[b].push(j);
    }
    for shard in &mut shards {
        while shard.len() < shard_size {
            shard.push(next.next().expect("enough ids"));
        }
    }
    Dataset::new(n, shards)
}

/// A stream of `f0` distinct items: the first `heavy.len()` of them occur
/// `heavy[k]` times each, the rest once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavyStreamSpec {
    pub f0: u64,
    pub heavy: Vec<u64>,
    pub universe_size: u64,
    pub seed: u64,
}

/// Items arrive in random order; all copies of a heavy item arrive
/// consecutively when `bursty`, scattered otherwise.
pub fn gen_heavy_stream(spec: &HeavyStreamSpec, bursty: bool) -> Result<Vec<u64>> {
    if spec.heavy.len() as u64 > spec.f0 {
        return Err(Error::InvalidSpec("more heavy items than distinct items".into()));
    }
    if spec.heavy.iter().any(|&f| f == 0) {
        return Err(Error::InvalidSpec("heavy frequencies must be positive".into()));
    }
    let mut rng = rng(spec.seed);
    let ids = random_ids(&mut rng, spec.universe_size, spec.f0)?;
    let freq = |k: usize| spec.heavy.get(k).copied().unwrap_or(1);
    if bursty {
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.shuffle(&mut rng);
        Ok(order
            .into_iter()
            .flat_map(|k| std::iter::repeat(ids[k]).take(freq(k) as usize))
            .collect())
    } else {
        let mut out: Vec<u64> = (0..ids.len())
            .flat_map(|k| std::iter::repeat(ids[k]).take(freq(k) as usize))
            .collect();
        out.shuffle(&mut rng);
        Ok(out)
    }
}
