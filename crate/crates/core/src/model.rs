//! Datasets split across players, and the exact quantities every estimator
//! is measured against.
//!
//! A [`Dataset`] is a universe size `n` together with one [`ShardVector`] per
//! player. Shards are sets: a player either holds an item or it does not.
//! For an item `j`, its *replication* `H_j` is the number of shards that hold
//! it. Everything in [`GroundTruth`] is a function of the replication
//! histogram:
//!
//! * `F0 = |{j : H_j >= 1}|`
//! * `F1 = sum_j H_j`
//! * excess mass `D = sum_j max(0, H_j - 1)`, so `F0 = F1 - D`
//! * pairwise collisions `C = sum_j binom(H_j, 2)`, so `C >= D`

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Largest accepted universe size. Keeps every `binom(H, 2)` sum inside `u64`.
pub const MAX_UNIVERSE: u64 = 1 << 48;

/// One player's local item set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardVector {
    player_id: usize,
    items: Vec<u64>,
}

impl ShardVector {
    /// Builds a shard from arbitrary ids. Duplicates collapse.
    pub fn new(player_id: usize, items: impl IntoIterator<Item = u64>) -> Self {
        let mut items: Vec<u64> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        Self { player_id, items }
    }

    pub fn player_id(&self) -> usize {
        self.player_id
    }

    /// Ids held by this player, ascending.
    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: u64) -> bool {
        self.items.binary_search(&item).is_ok()
    }
}

/// Items of a universe `[0, n)` distributed across `alpha >= 1` players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    universe_size: u64,
    shards: Vec<ShardVector>,
}

impl Dataset {
    /// Builds a dataset from one item collection per player. Player ids are
    /// assigned by position.
    pub fn new<I, S>(universe_size: u64, shards: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = u64>,
    {
        if universe_size > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(universe_size));
        }
        let shards: Vec<ShardVector> = shards
            .into_iter()
            .enumerate()
            .map(|(id, items)| ShardVector::new(id, items))
            .collect();
        if shards.is_empty() {
            return Err(Error::NoShards);
        }
        for shard in &shards {
            if let Some(&last) = shard.items.last() {
                if last >= universe_size {
                    return Err(Error::ItemOutOfRange {
                        item: last,
                        universe: universe_size,
                    });
                }
            }
        }
        Ok(Self {
            universe_size,
            shards,
        })
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    pub fn alpha(&self) -> usize {
        self.shards.len()
    }

    pub fn shards(&self) -> &[ShardVector] {
        &self.shards
    }

    /// Largest shard size `s`.
    pub fn max_shard_len(&self) -> usize {
        self.shards.iter().map(ShardVector::len).max().unwrap_or(0)
    }

    /// Keeps only the items accepted by `keep`, on every shard.
    pub fn restrict(&self, mut keep: impl FnMut(u64) -> bool) -> Dataset {
        let shards = self
            .shards
            .iter()
            .map(|s| ShardVector {
                player_id: s.player_id,
                items: s.items.iter().copied().filter(|&j| keep(j)).collect(),
            })
            .collect();
        Dataset {
            universe_size: self.universe_size,
            shards,
        }
    }

    /// `(item, H_item)` for every item held by at least one player, ascending by item.
    pub fn replication(&self) -> Vec<(u64, u64)> {
        let mut all: Vec<u64> = self
            .shards
            .iter()
            .flat_map(|s| s.items.iter().copied())
            .collect();
        all.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::new();
        for j in all {
            match out.last_mut() {
                Some((last, h)) if *last == j => *h += 1,
                _ => out.push((j, 1)),
            }
        }
        out
    }

    /// Flattens the dataset into an insertion-only stream: shard by shard,
    /// each held item once. The frequency of an item in the stream is its
    /// replication `H_j`.
    pub fn to_stream(&self) -> impl Iterator<Item = u64> + '_ {
        self.shards.iter().flat_map(|s| s.items.iter().copied())
    }

    /// Writes the canonical text form: a `n=<int> alpha=<int>` header, then
    /// one line per shard with its ids ascending and space separated.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n={} alpha={}", self.universe_size, self.alpha())?;
        let mut line = String::new();
        for shard in &self.shards {
            line.clear();
            for (k, item) in shard.items.iter().enumerate() {
                if k > 0 {
                    line.push(' ');
                }
                write!(line, "{item}").expect("writing to a String cannot fail");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the canonical text form produced by [`Dataset::write_text`].
    pub fn read_text<R: BufRead>(r: R) -> Result<Dataset> {
        let mut lines = r.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(Error::EmptyFile),
        };
        let (n, alpha) = parse_header(&header)?;
        let mut shards = Vec::with_capacity(alpha);
        for (k, line) in lines.enumerate() {
            let line_no = k as u64 + 2;
            let line = line?;
            if shards.len() == alpha {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("more than alpha={alpha} shard lines"),
                });
            }
            let ids = line
                .split_ascii_whitespace()
                .map(|tok| {
                    tok.parse::<u64>().map_err(|e| Error::Parse {
                        line: line_no,
                        message: format!("bad id {tok:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<u64>>>()?;
            shards.push(ids);
        }
        if shards.len() != alpha {
            return Err(Error::Parse {
                line: shards.len() as u64 + 1,
                message: format!("expected {alpha} shard lines, found {}", shards.len()),
            });
        }
        Dataset::new(n, shards)
    }

    pub fn from_text(text: &str) -> Result<Dataset> {
        Dataset::read_text(text.as_bytes())
    }
}

fn parse_header(header: &str) -> Result<(u64, usize)> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let mut n = None;
    let mut alpha = None;
    for field in header.split_ascii_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {field:?}")))?;
        match key {
            "n" => n = Some(value.parse::<u64>().map_err(|e| bad(e.to_string()))?),
            "alpha" => alpha = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            other => return Err(bad(format!("unknown header key {other:?}"))),
        }
    }
    match (n, alpha) {
        (Some(n), Some(alpha)) => Ok((n, alpha)),
        _ => Err(bad("header must be `n=<int> alpha=<int>`".into())),
    }
}

/// Exact values of every quantity the protocols estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub f0: u64,
    pub f1: u64,
    pub excess_mass: u64,
    pub pairwise_collisions: u64,
    /// replication `H` -> number of items held by exactly `H` players
    pub multiplicity_histogram: BTreeMap<u64, u64>,
}

fn binom2(h: u64) -> u64 {
    h * h.saturating_sub(1) / 2
}

/// Number of items held by at least one player.
pub fn f0_exact(d: &Dataset) -> u64 {
    d.replication().len() as u64
}

/// Total number of held items, summed over players.
pub fn f1_exact(d: &Dataset) -> u64 {
    d.shards.iter().map(|s| s.len() as u64).sum()
}

/// `sum_j binom(H_j, 2)`: the number of (player pair, item) incidences where
/// both players of the pair hold the item.
pub fn pairwise_collisions_exact(d: &Dataset) -> u64 {
    d.replication().into_iter().map(|(_, h)| binom2(h)).sum()
}

/// `sum_j max(0, H_j - 1)`.
pub fn excess_mass_exact(d: &Dataset) -> u64 {
    d.replication()
        .into_iter()
        .map(|(_, h)| h.saturating_sub(1))
        .sum()
}

pub fn ground_truth(d: &Dataset) -> GroundTruth {
    let mut multiplicity_histogram = BTreeMap::new();
    let (mut f0, mut f1, mut excess_mass, mut pairwise_collisions) = (0, 0, 0, 0);
    for (_, h) in d.replication() {
        *multiplicity_histogram.entry(h).or_insert(0) += 1;
        f0 += 1;
        f1 += h;
        excess_mass += h - 1;
        pairwise_collisions += binom2(h);
    }
    GroundTruth {
        f0,
        f1,
        excess_mass,
        pairwise_collisions,
        multiplicity_histogram,
    }
}
