//! One-pass distinct elements for streams where few items repeat.
//!
//! Sample the universe at rate `p` so that about `K / ε²` distinct items
//! survive, hash-partition the survivors into `B = ceil(8 C / ε)` buckets and
//! record the number of updates landing in each bucket. Buckets containing
//! only frequency-one items have binomially distributed counts; the at most
//! `C` buckets hit by a repeated item are outliers. A robust mean of the
//! bucket counts times `B` estimates the number of sampled distinct items,
//! and dividing by `p` scales back to the whole stream.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::sampling::{LevelSampler, SamplerSeed};
use crate::streaming::robust::robust_mean_est;

const SALT_SAMPLE: u64 = 0x51;
const SALT_BUCKET: u64 = 0x52;
const SALT_LEVEL: u64 = 0x53;

/// Parameters of [`one_pass_f0_robust`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnePassParams {
    pub eps: f64,
    /// Number `C` of items with frequency above one.
    pub c_param: u64,
    /// A value in `[F0 / 100, F0]`.
    pub x_hint: f64,
    /// Overrides the default trim `max(0.05, 2 C / B)`.
    pub trim: Option<f64>,
    /// Sampling rate numerator: `p = min(1, K / (ε² X))`.
    pub sample_constant: f64,
    pub seed: u64,
}

impl OnePassParams {
    pub const DEFAULT_SAMPLE_CONSTANT: f64 = 100.0;
    pub const MIN_TRIM: f64 = 0.05;

    pub fn new(eps: f64, c_param: u64, x_hint: f64, seed: u64) -> Self {
        Self {
            eps,
            c_param,
            x_hint,
            trim: None,
            sample_constant: Self::DEFAULT_SAMPLE_CONSTANT,
            seed,
        }
    }

    /// `B = ceil(8 C / ε)`, at least 1.
    pub fn buckets(&self) -> usize {
        ((8.0 * self.c_param as f64 / self.eps).ceil() as usize).max(1)
    }

    pub fn sample_rate(&self) -> f64 {
        (self.sample_constant / (self.eps * self.eps * self.x_hint)).min(1.0)
    }

    pub fn effective_trim(&self) -> f64 {
        self.trim.unwrap_or_else(|| {
            (2.0 * self.c_param as f64 / self.buckets() as f64)
                .max(Self::MIN_TRIM)
                .min(0.45)
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {}",
                self.eps
            )));
        }
        if !(self.x_hint > 0.0) {
            return Err(Error::InvalidHint);
        }
        Ok(())
    }
}

/// Result of a one-pass run.
#[derive(Clone, Debug, PartialEq)]
pub struct OnePassOutcome {
    pub estimate: f64,
    pub sample_rate: f64,
    pub bucket_counts: Vec<u64>,
    /// Counter storage in bits.
    pub space_bits: u64,
}

fn estimate_from_buckets(counts: &[u64], trim: f64, p: f64) -> Result<f64> {
    let samples: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let z = counts.len() as f64 * robust_mean_est(&samples, trim)?;
    Ok(z / p)
}

/// One-pass estimate of `F0` given a hint `X ∈ [F0/100, F0]`.
pub fn one_pass_f0_robust(
    stream: impl IntoIterator<Item = u64>,
    universe_size: u64,
    params: &OnePassParams,
) -> Result<OnePassOutcome> {
    params.validate()?;
    let sampler = LevelSampler::new(SamplerSeed::new(params.seed, SALT_SAMPLE), universe_size);
    let p = params.sample_rate();
    let b = params.buckets();
    let mut counts = vec![0u64; b];
    for item in stream {
        check_item(item, universe_size)?;
        if sampler.in_bernoulli(item, p, 0) {
            counts[sampler.bucket(item, b as u64, SALT_BUCKET) as usize] += 1;
        }
    }
    Ok(OnePassOutcome {
        estimate: estimate_from_buckets(&counts, params.effective_trim(), p)?,
        sample_rate: p,
        space_bits: b as u64 * 64,
        bucket_counts: counts,
    })
}

/// One-pass estimate without a hint.
///
/// Runs the bucket stage at every level `0..=ceil(log2 n)` of a nested level
/// sampler, next to a capped distinct-id tracker per level. At the end of the
/// pass the trackers give a constant-factor estimate `X'`; `X'/4` serves as
/// the hint and the deepest level whose rate still covers the required `p`
/// supplies the bucket counts.
pub fn one_pass_f0_auto(
    stream: impl IntoIterator<Item = u64>,
    universe_size: u64,
    eps: f64,
    c_param: u64,
    seed: u64,
) -> Result<OnePassOutcome> {
    let probe = OnePassParams::new(eps, c_param, 1.0, seed);
    probe.validate()?;
    let sampler = LevelSampler::new(SamplerSeed::new(seed, SALT_LEVEL), universe_size);
    let top = 64 - universe_size.saturating_sub(1).leading_zeros();
    let levels = top as usize + 1;
    let cap = crate::coordinator::constant_factor_threshold(universe_size);
    let b = probe.buckets();
    let mut counts = vec![vec![0u64; b]; levels];
    let mut seen: Vec<HashSet<u64>> = vec![HashSet::new(); levels];
    let mut overflow = vec![false; levels];
    let mut total = 0u64;
    for item in stream {
        check_item(item, universe_size)?;
        total += 1;
        let deepest = (sampler.max_level(item) as usize).min(levels - 1);
        let bucket = sampler.bucket(item, b as u64, SALT_BUCKET) as usize;
        for level in 0..=deepest {
            counts[level][bucket] += 1;
            if !overflow[level] {
                seen[level].insert(item);
                if seen[level].len() > cap {
                    overflow[level] = true;
                    seen[level] = HashSet::new();
                }
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let rough = (0..levels)
        .find(|&l| !overflow[l])
        .map(|l| seen[l].len() as f64 * 2f64.powi(l as i32))
        .unwrap_or(1.0)
        .max(1.0);
    let params = OnePassParams::new(eps, c_param, (rough / 4.0).max(1.0), seed);
    let p = params.sample_rate();
    // Deepest level j with 2^-j >= p.
    let j = ((1.0 / p).log2().floor().max(0.0) as usize).min(levels - 1);
    let rate = 2f64.powi(-(j as i32));
    Ok(OnePassOutcome {
        estimate: estimate_from_buckets(&counts[j], params.effective_trim(), rate)?,
        sample_rate: rate,
        space_bits: (levels * b) as u64 * 64 + (levels * cap) as u64 * 64,
        bucket_counts: counts.swap_remove(j),
    })
}

fn check_item(item: u64, universe: u64) -> Result<()> {
    if item >= universe {
        Err(Error::ItemOutOfRange { item, universe })
    } else {
        Ok(())
    }
}
