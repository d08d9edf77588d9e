//! Public randomness shared by every simulated player.
//!
//! All players hold the same [`SamplerSeed`], so membership of an item in a
//! subsample is a pure function of `(seed, salt, item)` and needs no
//! communication. Level sets are nested by construction: an item survives to
//! level `i` when the top `i` bits of its hash are zero, so surviving level
//! `i + 1` implies surviving level `i`.

/// Seed and domain-separation salt of one public random source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SamplerSeed {
    pub seed: u64,
    pub salt: u64,
}

impl SamplerSeed {
    pub const fn new(seed: u64, salt: u64) -> Self {
        Self { seed, salt }
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform-looking 64-bit hash of `item` under `(seed, salt)`.
///
/// The constant sequence is frozen by a golden test; changing it changes
/// every replay.
#[inline]
pub fn hash64(seed: u64, salt: u64, item: u64) -> u64 {
    hash_keyed(hash_key(seed, salt), item)
}

/// The per-`(seed, salt)` part of [`hash64`], for callers hashing many items.
#[inline]
pub fn hash_key(seed: u64, salt: u64) -> u64 {
    mix64(seed ^ mix64(salt.wrapping_add(GOLDEN)))
}

/// `hash64(seed, salt, item) == hash_keyed(hash_key(seed, salt), item)`.
#[inline]
pub fn hash_keyed(key: u64, item: u64) -> u64 {
    mix64(key.wrapping_add(item.wrapping_add(1).wrapping_mul(GOLDEN)) ^ (key >> 17))
}

/// `floor(p * 2^64)` as a comparison threshold, saturating at both ends.
/// `None` means "always accept" (p >= 1).
fn threshold(p: f64) -> Option<u64> {
    if p >= 1.0 {
        None
    } else if p <= 0.0 || p.is_nan() {
        Some(0)
    } else {
        // p < 1 so the product is below 2^64; the cast truncates (floor).
        Some((p * 18_446_744_073_709_551_616.0) as u64)
    }
}

/// Nested universe subsampling `S_0 ⊇ S_1 ⊇ ...`, with `Pr[j ∈ S_i] = 2^-i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelSampler {
    seed: SamplerSeed,
    universe_size: u64,
    key: u64,
}

impl LevelSampler {
    pub fn new(seed: SamplerSeed, universe_size: u64) -> Self {
        Self {
            seed,
            universe_size,
            key: hash_key(seed.seed, seed.salt),
        }
    }

    pub fn seed(&self) -> SamplerSeed {
        self.seed
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    /// Same seed under a different salt: an independent random source.
    pub fn with_salt(&self, salt: u64) -> Self {
        Self::new(SamplerSeed::new(self.seed.seed, salt), self.universe_size)
    }

    #[inline]
    pub fn hash(&self, item: u64) -> u64 {
        debug_assert!(item < self.universe_size, "item outside the universe");
        hash_keyed(self.key, item)
    }

    #[inline]
    fn hash_tagged(&self, item: u64, salt2: u64) -> u64 {
        if salt2 == 0 {
            hash_keyed(self.key, item)
        } else {
            hash64(self.seed.seed, self.seed.salt ^ salt2, item)
        }
    }

    /// `item ∈ S_level`. Level 0 is the whole universe; levels above 64 are
    /// empty (the survival probability underflows).
    #[inline]
    pub fn in_level(&self, item: u64, level: u32) -> bool {
        match level {
            0 => true,
            1..=64 => self.hash(item) >> (64 - level) == 0,
            _ => false,
        }
    }

    /// Deepest level the item survives to, capped at 64.
    #[inline]
    pub fn max_level(&self, item: u64) -> u32 {
        self.hash(item).leading_zeros()
    }

    /// Bernoulli(p) membership under the extra tag `salt2`.
    #[inline]
    pub fn in_bernoulli(&self, item: u64, p: f64, salt2: u64) -> bool {
        match threshold(p) {
            None => true,
            Some(t) => self.hash_tagged(item, salt2) < t,
        }
    }

    /// Uniform bucket in `[0, buckets)` under the extra tag `salt2`.
    #[inline]
    pub fn bucket(&self, item: u64, buckets: u64, salt2: u64) -> u64 {
        let h = self.hash_tagged(item, salt2);
        ((h as u128 * buckets as u128) >> 64) as u64
    }
}
