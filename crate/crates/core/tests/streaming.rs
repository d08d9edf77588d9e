use std::collections::HashMap;

use pairwise_f0::sampling::SamplerSeed;
use pairwise_f0::streaming::io::{read_stream, write_stream, StreamFormat};
use pairwise_f0::streaming::{
    one_pass_f0_auto, one_pass_f0_robust, robust_mean_est, two_pass_f0, two_pass_f0_small,
    CountSketch, LevelSetConfig, OnePassParams, SamplingRule,
};
use pairwise_f0::workloads::{gen_heavy_stream, HeavyStreamSpec};
use proptest::prelude::*;

fn within(estimate: f64, truth: f64, eps: f64) -> bool {
    (estimate - truth).abs() <= eps * truth
}

fn distinct(stream: &[u64]) -> u64 {
    let mut v = stream.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len() as u64
}

#[test]
fn frequency_two_falls_below_every_band() {
    let n = 100_000;
    let mut stream: Vec<u64> = (0..5_000).map(|j| j * 7).collect();
    stream.push(14);
    let cfg = LevelSetConfig::small_c(n, 0.1);
    assert_eq!(cfg.band(2), None);
    let out = two_pass_f0_small(stream.iter().copied(), stream.iter().copied(), &cfg, 1).unwrap();
    // Nothing is subtracted: the estimate is F1 = F0 + 1.
    assert_eq!(out.tracked, 0);
    assert_eq!(out.estimate, 5_001.0);
    assert!(within(out.estimate, 5_000.0, 0.1));
}

#[test]
fn small_c_zipf_lite() {
    let n = 100_000;
    let eps = 0.1;
    let cfg = LevelSetConfig::small_c(n, eps);
    let mut good = 0;
    for s in 0..100 {
        // Five heavy items with frequencies 200000 / i.
        let heavy: Vec<u64> = (1..=5).map(|i| 200_000 / i).collect();
        let spec = HeavyStreamSpec { f0: 50_000, heavy, universe_size: n, seed: s };
        let stream = gen_heavy_stream(&spec, true).unwrap();
        let out = two_pass_f0_small(stream.iter().copied(), stream.iter().copied(), &cfg, s).unwrap();
        if within(out.estimate, 50_000.0, eps) {
            good += 1;
        }
    }
    assert!(good >= 85, "{good}/100");
}

#[test]
fn tracked_items_use_exact_frequencies() {
    let n = 50_000;
    let cfg = LevelSetConfig::large_c(n, 0.25, 10);
    let cut = cfg.report_cut().ceil() as u64;
    let heavy: Vec<u64> = (0..10).map(|k| cut + 37 * k).collect();
    let spec = HeavyStreamSpec { f0: 8_000, heavy: heavy.clone(), universe_size: n, seed: 3 };
    // Scattered order: the sketch sees each copy separately.
    let stream = gen_heavy_stream(&spec, false).unwrap();
    let out = two_pass_f0(stream.iter().copied(), stream.iter().copied(), &cfg, 3).unwrap();
    let excess: f64 = heavy.iter().map(|&f| (f - 1) as f64).sum();
    assert_eq!(out.band_excess.iter().sum::<f64>(), excess);
    assert_eq!(out.estimate, 8_000.0);
}

#[test]
fn literal_rule_runs() {
    let n = 20_000;
    let cfg = LevelSetConfig::large_c(n, 0.25, 4).with_rule(SamplingRule::Literal);
    let spec = HeavyStreamSpec { f0: 3_000, heavy: vec![], universe_size: n, seed: 1 };
    let stream = gen_heavy_stream(&spec, true).unwrap();
    let out = two_pass_f0(stream.iter().copied(), stream.iter().copied(), &cfg, 1).unwrap();
    assert_eq!(out.estimate, 3_000.0);
}

#[test]
fn one_pass_without_hint() {
    let eps = 0.1;
    let mut good = 0;
    for s in 0..50 {
        let heavy: Vec<u64> = (0..20).map(|k| 2 + 5 * k).collect();
        let spec = HeavyStreamSpec { f0: 30_000, heavy, universe_size: 1 << 20, seed: s };
        let stream = gen_heavy_stream(&spec, false).unwrap();
        let out = one_pass_f0_auto(stream, 1 << 20, eps, 20, s).unwrap();
        if within(out.estimate, 30_000.0, 2.0 * eps) {
            good += 1;
        }
    }
    assert!(good >= 40, "{good}/50");
}

#[test]
fn one_pass_hint_range() {
    // Any hint in [F0/100, F0] keeps the estimate accurate.
    let spec = HeavyStreamSpec { f0: 40_000, heavy: vec![50; 10], universe_size: 1 << 20, seed: 2 };
    let stream = gen_heavy_stream(&spec, false).unwrap();
    for hint in [400.0, 4_000.0, 40_000.0] {
        let params = OnePassParams::new(0.1, 10, hint, 2);
        let out = one_pass_f0_robust(stream.iter().copied(), 1 << 20, &params).unwrap();
        assert!(within(out.estimate, 40_000.0, 0.1), "hint {hint}: {}", out.estimate);
    }
}

#[test]
fn stream_files_round_trip() {
    let spec = HeavyStreamSpec { f0: 500, heavy: vec![3, 9], universe_size: 1 << 40, seed: 4 };
    let stream = gen_heavy_stream(&spec, false).unwrap();
    for format in [StreamFormat::Lines, StreamFormat::Binary] {
        let mut buf = Vec::new();
        write_stream(&mut buf, stream.iter().copied(), format).unwrap();
        let back = read_stream(&buf[..], format).unwrap();
        assert_eq!(back, stream);
        assert_eq!(distinct(&back), 500);
    }
}

proptest! {
    #[test]
    fn countsketch_is_linear(
        a in prop::collection::vec((0u64..500, -50i64..50), 0..80),
        b in prop::collection::vec((0u64..500, -50i64..50), 0..80),
        seed: u64,
    ) {
        let mk = || CountSketch::new(5, 32, SamplerSeed::new(seed, 1));
        let (mut sa, mut sb, mut sab) = (mk(), mk(), mk());
        for &(j, d) in &a { sa.update_by(j, d); sab.update_by(j, d); }
        for &(j, d) in &b { sb.update_by(j, d); sab.update_by(j, d); }
        sa.merge(&sb).unwrap();
        prop_assert_eq!(sa.counters(), sab.counters());
    }

    #[test]
    fn lone_item_is_exact(f in 1i64..10_000, item in 0u64..1 << 30, seed: u64) {
        let mut cs = CountSketch::new(7, 64, SamplerSeed::new(seed, 2));
        cs.update_by(item, f);
        prop_assert_eq!(cs.estimate(item), f as f64);
    }

    #[test]
    fn untrimmed_mean_is_the_mean(xs in prop::collection::vec(0u32..1000, 1..200)) {
        let samples: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let mean = xs.iter().map(|&x| x as u64).sum::<u64>() as f64 / xs.len() as f64;
        prop_assert_eq!(robust_mean_est(&samples, 0.0).unwrap(), mean);
    }

    #[test]
    fn same_stream_twice_never_mismatches(
        stream in prop::collection::vec(0u64..2_000, 1..400),
        seed: u64,
    ) {
        let small = LevelSetConfig::small_c(2_000, 0.25);
        let large = LevelSetConfig::large_c(2_000, 0.25, 3);
        let a = two_pass_f0_small(stream.iter().copied(), stream.iter().copied(), &small, seed);
        let b = two_pass_f0(stream.iter().copied(), stream.iter().copied(), &large, seed);
        prop_assert!(a.is_ok() && b.is_ok());
        // Short streams hold no heavy items, so nothing is subtracted.
        prop_assert_eq!(a.unwrap().estimate, stream.len() as f64);
    }

    #[test]
    fn frequency_one_streams_are_exact(ids in prop::collection::hash_set(0u64..10_000, 1..500), seed: u64) {
        let stream: Vec<u64> = ids.into_iter().collect();
        let cfg = LevelSetConfig::small_c(10_000, 0.1);
        let out = two_pass_f0_small(stream.iter().copied(), stream.iter().copied(), &cfg, seed).unwrap();
        prop_assert_eq!(out.estimate, stream.len() as f64);
    }
}

#[test]
fn band_accounting_matches_oracle() {
    // Every item at or above the cut is found and subtracted with its own f − 1.
    let n = 30_000;
    let cfg = LevelSetConfig::small_c(n, 0.5);
    let cut = cfg.report_cut().ceil() as u64;
    let heavy = vec![cut, 2 * cut, 5 * cut];
    let spec = HeavyStreamSpec { f0: 2_000, heavy, universe_size: n, seed: 9 };
    let stream = gen_heavy_stream(&spec, true).unwrap();
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for &j in &stream {
        *freq.entry(j).or_insert(0) += 1;
    }
    let out = two_pass_f0_small(stream.iter().copied(), stream.iter().copied(), &cfg, 9).unwrap();
    let mut per_band = vec![0.0; cfg.levels as usize];
    for &f in freq.values() {
        if let Some(b) = cfg.band(f) {
            per_band[b as usize - 1] += (f - 1) as f64 * cfg.rescale(b);
        }
    }
    assert_eq!(out.band_excess, per_band);
    assert_eq!(out.estimate, 2_000.0);
}
