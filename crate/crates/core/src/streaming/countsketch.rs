use crate::error::{Error, Result};
use crate::sampling::{hash_key, hash_keyed, mix64, SamplerSeed};

/// Linear sketch of a frequency vector: `rows` independent hash tables of
/// `buckets` signed counters. Row `r` adds `sign_r(j)` to bucket `h_r(j)`
/// for every update of item `j`; the point estimate is the median over rows
/// of `sign_r(j) · counter[r][h_r(j)]`.
///
/// With `y` the frequency vector minus its `b` largest entries, every point
/// estimate is within `‖y‖₂ / √b` of the truth with high probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSketch {
    rows: usize,
    buckets: usize,
    seed: SamplerSeed,
    row_keys: Vec<u64>,
    counters: Vec<i64>,
}

impl CountSketch {
    pub fn new(rows: usize, buckets: usize, seed: SamplerSeed) -> Self {
        assert!(rows >= 1 && buckets >= 1, "sketch needs rows and buckets");
        Self {
            rows,
            buckets,
            seed,
            row_keys: (0..rows as u64)
                .map(|r| hash_key(seed.seed, seed.salt ^ mix64(r + 1)))
                .collect(),
            counters: vec![0; rows * buckets],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn counters(&self) -> &[i64] {
        &self.counters
    }

    /// `(bucket, sign)` of `item` in `row`.
    #[inline]
    fn locate(&self, row: usize, item: u64) -> (usize, i64) {
        let h = hash_keyed(self.row_keys[row], item);
        let bucket = ((h as u128 * self.buckets as u128) >> 64) as usize;
        let sign = if h & 1 == 1 { 1 } else { -1 };
        (bucket, sign)
    }

    pub fn update(&mut self, item: u64) {
        self.update_by(item, 1);
    }

    pub fn update_by(&mut self, item: u64, delta: i64) {
        for row in 0..self.rows {
            let (b, s) = self.locate(row, item);
            self.counters[row * self.buckets + b] += s * delta;
        }
    }

    /// Median over rows; the mean of the two middle values for an even row count.
    pub fn estimate(&self, item: u64) -> f64 {
        let mut per_row: Vec<i64> = (0..self.rows)
            .map(|row| {
                let (b, s) = self.locate(row, item);
                s * self.counters[row * self.buckets + b]
            })
            .collect();
        let mid = self.rows / 2;
        let (_, &mut upper, _) = per_row.select_nth_unstable(mid);
        if self.rows % 2 == 1 {
            upper as f64
        } else {
            let lower = *per_row[..mid].iter().max().expect("rows >= 2");
            (lower as f64 + upper as f64) / 2.0
        }
    }

    /// `estimate(item) >= cut`, stopping once the outcome is settled. Exact
    /// for odd row counts; even counts defer to [`CountSketch::estimate`].
    pub fn estimate_at_least(&self, item: u64, cut: f64) -> bool {
        if self.rows % 2 == 0 {
            return self.estimate(item) >= cut;
        }
        let need = self.rows / 2 + 1;
        let (mut above, mut below) = (0, 0);
        for row in 0..self.rows {
            let (b, s) = self.locate(row, item);
            if (s * self.counters[row * self.buckets + b]) as f64 >= cut {
                above += 1;
                if above == need {
                    return true;
                }
            } else {
                below += 1;
                if below == need {
                    return false;
                }
            }
        }
        unreachable!("one side reaches a majority of an odd row count")
    }

    /// Counter-wise sum; both sketches must share shape and seed.
    pub fn merge(&mut self, other: &CountSketch) -> Result<()> {
        if self.rows != other.rows || self.buckets != other.buckets || self.seed != other.seed {
            return Err(Error::InvalidParameter(
                "cannot merge sketches with different shape or seed".into(),
            ));
        }
        for (a, b) in self.counters.iter_mut().zip(&other.counters) {
            *a += b;
        }
        Ok(())
    }

    /// Counter storage in bits.
    pub fn space_bits(&self) -> u64 {
        self.counters.len() as u64 * 64
    }
}
