//! Two-pass distinct elements through level sets of heavy items.
//!
//! `F0 = F1 − M` where `M = Σ_j max(0, f_j − 1)` is the excess mass. Items
//! are grouped into frequency bands `Γ_1 = {f ≥ T/2}` and
//! `Γ_ℓ = {T/2^ℓ ≤ f < T/2^(ℓ−1)}`. Pass one runs a CountSketch per level
//! over a subsample `S_ℓ`; every item whose sketch estimate clears the
//! smallest band threshold becomes a candidate. Pass two counts candidates
//! exactly. Each candidate then contributes `rescale(ℓ) · (f_j − 1)` to the
//! band it belongs to, provided it was sampled into that band's level.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sampling::{mix64, LevelSampler, SamplerSeed};
use crate::streaming::countsketch::CountSketch;

const SALT_LEVEL: u64 = 0x61;
const SALT_SKETCH: u64 = 0x62;

/// Which estimator the configuration belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Many repeated items: `B = C · polylog`, β offset `log2(10 √C/ε · log2(n/ε))`.
    LargeC { c_param: u64 },
    /// Fewer than `1/ε` repeated items: `B = (1/ε) · polylog`, β offset `log2(10/ε · log2(n/ε))`.
    SmallC,
}

/// How level `ℓ` is sampled and rescaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingRule {
    /// Sample at `2^-β_ℓ`, rescale by `2^β_ℓ`: an unbiased pair.
    SelfConsistent,
    /// Sample at `2^-(2ℓ−2)` and rescale by `2^(2β_ℓ)` (large C), or sample
    /// at `2^-(ℓ−1)` and rescale by `2^β_ℓ` (small C).
    Literal,
}

/// Levels, bucket count and band threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSetConfig {
    pub eps: f64,
    pub universe_size: u64,
    pub regime: Regime,
    pub rule: SamplingRule,
    /// Number of levels `L`.
    pub levels: u32,
    /// Buckets per CountSketch row.
    pub buckets: usize,
    /// CountSketch rows.
    pub rows: usize,
    /// Band threshold `T`.
    pub threshold: f64,
    /// `β_ℓ = max(0, ℓ − beta_offset)`.
    pub beta_offset: f64,
}

impl LevelSetConfig {
    /// Exponent of `log2(n/ε)` in the bucket count.
    pub const POLYLOG_EXPONENT: i32 = 1;

    fn base(universe_size: u64, eps: f64, regime: Regime) -> Self {
        let log_ne = (universe_size.max(2) as f64 / eps).log2();
        let levels = (1.0 / eps).log2().ceil().max(0.0) as u32 + 4;
        let threshold = 100.0 / (eps * eps) * log_ne * log_ne;
        let polylog = log_ne.powi(Self::POLYLOG_EXPONENT);
        let (buckets, beta_offset) = match regime {
            Regime::LargeC { c_param } => (
                c_param.max(1) as f64 * polylog,
                (10.0 * (c_param.max(1) as f64).sqrt() / eps * log_ne).log2(),
            ),
            Regime::SmallC => (polylog / eps, (10.0 / eps * log_ne).log2()),
        };
        let mut rows = (universe_size.max(2) as f64).log2().ceil() as usize;
        if rows % 2 == 0 {
            rows += 1;
        }
        Self {
            eps,
            universe_size,
            regime,
            rule: SamplingRule::SelfConsistent,
            levels: levels.max(1),
            buckets: (buckets.ceil() as usize).max(1),
            rows,
            threshold: threshold.max(1.0),
            beta_offset,
        }
    }

    /// Configuration for many repeated items (`c_param` of them).
    pub fn large_c(universe_size: u64, eps: f64, c_param: u64) -> Self {
        Self::base(universe_size, eps, Regime::LargeC { c_param })
    }

    /// Configuration for fewer than `1/ε` repeated items.
    pub fn small_c(universe_size: u64, eps: f64) -> Self {
        Self::base(universe_size, eps, Regime::SmallC)
    }

    pub fn with_rule(mut self, rule: SamplingRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn beta(&self, level: u32) -> f64 {
        (level as f64 - self.beta_offset).max(0.0)
    }

    /// Probability that an item belongs to `S_level`.
    pub fn sample_prob(&self, level: u32) -> f64 {
        let l = level as f64;
        match (self.rule, self.regime) {
            (SamplingRule::SelfConsistent, _) => 2f64.powf(-self.beta(level)),
            (SamplingRule::Literal, Regime::LargeC { .. }) => 2f64.powf(-(2.0 * l - 2.0)),
            (SamplingRule::Literal, Regime::SmallC) => 2f64.powf(-(l - 1.0)),
        }
    }

    /// Weight of one band-`level` item's excess.
    pub fn rescale(&self, level: u32) -> f64 {
        match (self.rule, self.regime) {
            (SamplingRule::Literal, Regime::LargeC { .. }) => 2f64.powf(2.0 * self.beta(level)),
            _ => 2f64.powf(self.beta(level)),
        }
    }

    /// Candidate cut `T / 2^L`: half the smallest band's upper edge.
    pub fn report_cut(&self) -> f64 {
        self.threshold / 2f64.powi(self.levels as i32)
    }

    /// Band of frequency `f`: 1 for `f ≥ T/2`, `ℓ` for
    /// `T/2^ℓ ≤ f < T/2^(ℓ−1)`, `None` below `T/2^L`.
    pub fn band(&self, f: u64) -> Option<u32> {
        let f = f as f64;
        (1..=self.levels).find(|&l| f >= self.threshold / 2f64.powi(l as i32))
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {}",
                self.eps
            )));
        }
        if self.levels == 0 || self.buckets == 0 || self.rows == 0 || self.threshold < 1.0 {
            return Err(Error::InvalidParameter(
                "levels, buckets, rows and threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a two-pass run.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPassOutcome {
    pub estimate: f64,
    /// `F1(S_1)`.
    pub level_one_f1: u64,
    /// Estimated excess mass per band, index 0 is band 1.
    pub band_excess: Vec<f64>,
    /// Candidates tracked exactly in pass two.
    pub tracked: usize,
    /// Sketch counters in bits.
    pub space_bits: u64,
}

fn level_samplers(cfg: &LevelSetConfig, seed: u64) -> Vec<LevelSampler> {
    (1..=cfg.levels)
        .map(|l| {
            LevelSampler::new(
                SamplerSeed::new(seed, SALT_LEVEL ^ mix64(l as u64)),
                cfg.universe_size,
            )
        })
        .collect()
}

fn in_level(samplers: &[LevelSampler], cfg: &LevelSetConfig, level: u32, item: u64) -> bool {
    samplers[level as usize - 1].in_bernoulli(item, cfg.sample_prob(level), 0)
}

/// Groups consecutive equal items into `(item, run length)`.
fn runs(stream: impl IntoIterator<Item = u64>) -> impl Iterator<Item = (u64, u64)> {
    let mut it = stream.into_iter().peekable();
    std::iter::from_fn(move || {
        let item = it.next()?;
        let mut len = 1;
        while it.next_if_eq(&item).is_some() {
            len += 1;
        }
        Some((item, len))
    })
}

fn run_two_pass(
    pass1: impl IntoIterator<Item = u64>,
    pass2: impl IntoIterator<Item = u64>,
    cfg: &LevelSetConfig,
    seed: u64,
) -> Result<TwoPassOutcome> {
    cfg.validate()?;
    let n = cfg.universe_size;
    let samplers = level_samplers(cfg, seed);
    let mut sketches: Vec<CountSketch> = (1..=cfg.levels)
        .map(|l| {
            CountSketch::new(
                cfg.rows,
                cfg.buckets,
                SamplerSeed::new(seed, SALT_SKETCH ^ mix64(l as u64)),
            )
        })
        .collect();

    // Pass one: sketches and F1(S_1).
    let mut first_total = 0u64;
    let mut level_one_f1 = 0u64;
    for (item, len) in runs(pass1) {
        if item >= n {
            return Err(Error::ItemOutOfRange { item, universe: n });
        }
        first_total += len;
        for level in 1..=cfg.levels {
            if in_level(&samplers, cfg, level, item) {
                sketches[level as usize - 1].update_by(item, len as i64);
                if level == 1 {
                    level_one_f1 += len;
                }
            }
        }
    }

    let cut = cfg.report_cut();
    let mut tracked: HashMap<u64, u64> = HashMap::new();
    for item in 0..n {
        let reported = (1..=cfg.levels).any(|level| {
            in_level(&samplers, cfg, level, item)
                && sketches[level as usize - 1].estimate_at_least(item, cut)
        });
        if reported {
            tracked.insert(item, 0);
        }
    }

    // Pass two: exact frequencies of the candidates.
    let mut second_total = 0u64;
    for (item, len) in runs(pass2) {
        second_total += len;
        if let Some(f) = tracked.get_mut(&item) {
            *f += len;
        }
    }
    if first_total != second_total {
        return Err(Error::PassMismatch {
            first: first_total,
            second: second_total,
        });
    }

    let mut band_excess = vec![0.0; cfg.levels as usize];
    let mut tracked_sorted: Vec<(u64, u64)> = tracked.iter().map(|(&j, &f)| (j, f)).collect();
    tracked_sorted.sort_unstable();
    for (item, f) in tracked_sorted {
        if f < 2 {
            continue;
        }
        let Some(band) = cfg.band(f) else { continue };
        if !in_level(&samplers, cfg, band, item) {
            continue;
        }
        let excess = (f - 1) as f64;
        band_excess[band as usize - 1] += if f as f64 >= cfg.threshold {
            excess
        } else {
            cfg.rescale(band) * excess
        };
    }

    Ok(TwoPassOutcome {
        estimate: level_one_f1 as f64 - band_excess.iter().sum::<f64>(),
        level_one_f1,
        band_excess,
        tracked: tracked.len(),
        space_bits: sketches.iter().map(CountSketch::space_bits).sum(),
    })
}

/// Two-pass estimate for streams with many repeated items; build `cfg` with
/// [`LevelSetConfig::large_c`].
pub fn two_pass_f0(
    pass1: impl IntoIterator<Item = u64>,
    pass2: impl IntoIterator<Item = u64>,
    cfg: &LevelSetConfig,
    seed: u64,
) -> Result<TwoPassOutcome> {
    if !matches!(cfg.regime, Regime::LargeC { .. }) {
        return Err(Error::InvalidParameter(
            "two_pass_f0 needs a large-C configuration".into(),
        ));
    }
    run_two_pass(pass1, pass2, cfg, seed)
}

/// Two-pass estimate for streams with fewer than `1/ε` repeated items; build
/// `cfg` with [`LevelSetConfig::small_c`].
pub fn two_pass_f0_small(
    pass1: impl IntoIterator<Item = u64>,
    pass2: impl IntoIterator<Item = u64>,
    cfg: &LevelSetConfig,
    seed: u64,
) -> Result<TwoPassOutcome> {
    if cfg.regime != Regime::SmallC {
        return Err(Error::InvalidParameter(
            "two_pass_f0_small needs a small-C configuration".into(),
        ));
    }
    run_two_pass(pass1, pass2, cfg, seed)
}
