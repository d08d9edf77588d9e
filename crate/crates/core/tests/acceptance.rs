//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! `PF0_CAIDA_EDGES=<path>` additionally checks criterion 10 against a real
//! sender,receiver extract.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pairwise_f0::coordinator::{
    collision_bounded_f0, duplication_estimate, eps_approx_f0, DuplicationParams, Phase,
    SimNetwork,
};
use pairwise_f0::experiment::{run_accuracy_vs_eps, run_comm_vs_eps, ExperimentConfig, Protocol, Workload};
use pairwise_f0::model::{
    excess_mass_exact, f0_exact, f1_exact, ground_truth, pairwise_collisions_exact, Dataset,
};
use pairwise_f0::sampling::SamplerSeed;
use pairwise_f0::streaming::{
    one_pass_f0_robust, two_pass_f0, two_pass_f0_small, CountSketch, LevelSetConfig,
    OnePassParams,
};
use pairwise_f0::workloads::{
    fit_zipf, fit_zipf_real, gen_duplicates, gen_heavy_stream, gen_planted, gen_replicated,
    gen_zipfian_dataset, load_edges, partition_by_receiver, senders_per_receiver,
    zipf_series, HeavyStreamSpec, PlantedSpec, ZipfSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(estimate: f64, truth: f64, eps: f64) -> bool {
    (estimate - truth).abs() <= eps * truth
}

/// Pairwise collisions by enumerating `(item, i, j)` with `i < j`, directly
/// from shard membership.
fn collisions_by_triples(d: &Dataset) -> u64 {
    let shards = d.shards();
    let mut c = 0;
    for item in 0..d.universe_size() {
        for i in 0..shards.len() {
            if !shards[i].contains(item) {
                continue;
            }
            for s in &shards[i + 1..] {
                if s.contains(item) {
                    c += 1;
                }
            }
        }
    }
    c
}

fn c1_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=2000u64);
        let alpha = rng.gen_range(1..=10usize);
        let shards: Vec<Vec<u64>> = (0..alpha)
            .map(|_| {
                let len = rng.gen_range(0..=n.min(300));
                (0..len).map(|_| rng.gen_range(0..n)).collect()
            })
            .collect();
        let d = Dataset::new(n, shards).unwrap();
        let (f0, f1) = (f0_exact(&d), f1_exact(&d));
        let (c, dm) = (pairwise_collisions_exact(&d), excess_mass_exact(&d));
        if f0 != f1 - dm || c < dm || c != collisions_by_triples(&d) {
            bad += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad == 0 && elapsed < Duration::from_secs(10),
        format!("{bad} of 500 datasets violate an identity, {elapsed:.2?} (< 10 s)"),
    )
}

fn c2_alg1_accuracy() -> Outcome {
    let start = Instant::now();
    let z = ZipfSpec { exponent: 1.5, scale: 16.0, support: 200_000, seed: 2 };
    let d = gen_zipfian_dataset(&z, 16, 1_000_000).unwrap();
    let f0 = f0_exact(&d) as f64;
    let eps = 0.05;
    let good = (0..100)
        .filter(|&s| within(eps_approx_f0(SimNetwork::new(&d, s), eps).unwrap().estimate, f0, eps))
        .count();
    let elapsed = start.elapsed();
    outcome(
        good >= 90 && elapsed < Duration::from_secs(120),
        format!("F0 = {f0}, {good}/100 within (1±{eps})F0 (need 90), {elapsed:.2?} (< 2 min)"),
    )
}

fn c3_alg1_unbiased() -> Outcome {
    let spec = PlantedSpec { f0_target: 100_000, collisions_target: 5_000, alpha: 8 };
    let d = gen_planted(&spec, 1 << 24, 3).unwrap();
    let f0 = f0_exact(&d) as f64;
    let mut levels = BTreeSet::new();
    let xs: Vec<f64> = (0..1000)
        .map(|s| {
            let r = eps_approx_f0(SimNetwork::new(&d, s), 0.5).unwrap();
            levels.insert(r.level_used);
            r.estimate
        })
        .collect();
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    let z = (mean - f0) / se;
    outcome(
        z.abs() <= 3.0 && levels.iter().any(|&l| l > 0),
        format!("mean {mean:.1} vs F0 {f0}, SE {se:.1}, z = {z:.2} (|z| ≤ 3), levels {levels:?}"),
    )
}

fn c4_alg2() -> Outcome {
    let spec = PlantedSpec { f0_target: 10_000, collisions_target: 500, alpha: 8 };
    let d = gen_planted(&spec, 1 << 20, 4).unwrap();
    let gt = ground_truth(&d);
    assert_eq!((gt.pairwise_collisions, gt.excess_mass), (500, 500));
    let eps = 0.1;
    let (mut accurate, mut frugal) = (0, 0);
    for s in 0..100 {
        let r = collision_bounded_f0(SimNetwork::new(&d, s), eps, 500).unwrap();
        if within(r.estimate, gt.f0 as f64, eps) {
            accurate += 1;
        }
        let p = r.diagnostics.sample_rate.unwrap();
        let level_f1 = r.diagnostics.level_f1.unwrap() as f64;
        if r.ledger.items_in(Phase::ExcessSample) as f64 <= 4.0 * p * level_f1 {
            frugal += 1;
        }
    }
    outcome(
        accurate >= 90 && frugal >= 95,
        format!("{accurate}/100 within (1±{eps})F0 (need 90), T-phase bound held {frugal}/100 (need 95)"),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

fn c5_sqrt_beta() -> Outcome {
    let f0 = 10_000u64;
    let medians: Vec<f64> = [1u64, 4, 16]
        .iter()
        .map(|&beta| {
            let d = gen_replicated(f0, beta * f0, 16, 1 << 24, 50 + beta).unwrap();
            median(
                (0..50)
                    .map(|s| {
                        let r = eps_approx_f0(SimNetwork::new(&d, s), 0.5).unwrap();
                        r.ledger.payload_bits_in(Phase::Sample) as f64
                    })
                    .collect(),
            )
        })
        .collect();
    let g1 = medians[1] / medians[0];
    let g2 = medians[2] / medians[1];
    let ok = |g: f64| (1.4..=6.0).contains(&g);
    outcome(
        ok(g1) && ok(g2),
        format!("median send-phase bits {medians:?}, growth {g1:.2} and {g2:.2} per 4x β (need [1.4, 6])"),
    )
}

fn c6_duplication() -> Outcome {
    let eps = 0.25;
    let mut parts = Vec::new();
    let mut pass = true;
    for d in [32u64, 256] {
        for (label, planted) in [("hi", (1.0 + eps) * d as f64), ("lo", (1.0 - eps) * d as f64)] {
            let planted = planted.round() as u64;
            let (mut correct, mut short) = (0, 0);
            for s in 0..100 {
                let ds = gen_duplicates(8, 500, planted, 1 << 24, 1000 * d + s).unwrap();
                let r = duplication_estimate(SimNetwork::new(&ds, s), DuplicationParams::new(eps, d))
                    .unwrap();
                if r.iterations <= 20 {
                    short += 1;
                }
                if (r.estimate > d as f64) == (label == "hi") {
                    correct += 1;
                }
            }
            pass &= correct >= 85 && short >= 99;
            parts.push(format!("D={d} {label}({planted}): {correct}/100, ≤20 iterations {short}/100"));
        }
    }
    let p = DuplicationParams::new(eps, 1);
    outcome(
        pass,
        format!(
            "{} (need 85 and 99); κ = {}, ξ = {}",
            parts.join("; "),
            p.sample_constant,
            p.xi
        ),
    )
}

fn c7_countsketch() -> Outcome {
    let (b, r) = (256usize, 9usize);
    let mut frac_sum = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let mut freq: Vec<(u64, i64)> = (0..10_000u64)
            .map(|j| (j, rng.gen_range(1..=20)))
            .collect();
        for k in 0..10u64 {
            freq.push((100_000 + k, rng.gen_range(5_000..50_000)));
        }
        let mut cs = CountSketch::new(r, b, SamplerSeed::new(seed, 7));
        for &(j, f) in &freq {
            cs.update_by(j, f);
        }
        let mut sorted: Vec<i64> = freq.iter().map(|x| x.1).collect();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let tail: f64 = sorted[10..].iter().map(|&f| (f as f64).powi(2)).sum::<f64>().sqrt();
        let bound = tail / (b as f64).sqrt();
        let good = freq
            .iter()
            .filter(|&&(j, f)| (cs.estimate(j) - f as f64).abs() <= bound)
            .count();
        frac_sum += good as f64 / freq.len() as f64;
    }
    let frac = frac_sum / 20.0;
    outcome(frac >= 0.95, format!("{:.2}% of items within ‖tail‖₂/√b (need 95%)", 100.0 * frac))
}

fn c8_two_pass() -> Outcome {
    let n = 100_000u64;
    let eps = 0.1;
    let mut parts = Vec::new();
    let mut pass = true;

    // All frequencies one: exact, every seed.
    let ones = gen_heavy_stream(
        &HeavyStreamSpec { f0: 30_000, heavy: vec![], universe_size: n, seed: 8 },
        true,
    )
    .unwrap();
    let large = LevelSetConfig::large_c(n, eps, 200);
    let small = LevelSetConfig::small_c(n, eps);
    let mut exact = 0;
    for s in 0..10 {
        let a = two_pass_f0(ones.iter().copied(), ones.iter().copied(), &large, s).unwrap();
        let b = two_pass_f0_small(ones.iter().copied(), ones.iter().copied(), &small, s).unwrap();
        if a.estimate == 30_000.0 && b.estimate == 30_000.0 {
            exact += 1;
        }
    }
    pass &= exact == 10;
    parts.push(format!("frequency-one exact {exact}/10"));

    // Heavy items at or above the smallest band.
    let cut = large.report_cut().ceil() as u64;
    for (label, heavy_count, cfg) in [("C=200", 200usize, large), ("C=5", 5, small)] {
        let mut good = 0;
        for s in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + s);
            let heavy: Vec<u64> = (0..heavy_count).map(|_| rng.gen_range(cut..2 * cut)).collect();
            let spec = HeavyStreamSpec { f0: 20_000, heavy, universe_size: n, seed: s };
            let stream = gen_heavy_stream(&spec, true).unwrap();
            let out = if heavy_count == 5 {
                two_pass_f0_small(stream.iter().copied(), stream.iter().copied(), &cfg, s)
            } else {
                two_pass_f0(stream.iter().copied(), stream.iter().copied(), &cfg, s)
            }
            .unwrap();
            if within(out.estimate, 20_000.0, eps) {
                good += 1;
            }
        }
        pass &= good >= 85;
        parts.push(format!("{label}: {good}/100"));
    }
    outcome(pass, format!("{} (need 85), heavy frequencies in [{cut}, {})", parts.join(", "), 2 * cut))
}

fn c9_one_pass() -> Outcome {
    let eps = 0.1;
    let f0 = 20_000u64;
    let mut good = 0;
    for s in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + s);
        let heavy: Vec<u64> = (0..20).map(|_| rng.gen_range(2..=200)).collect();
        let spec = HeavyStreamSpec { f0, heavy, universe_size: 1 << 20, seed: s };
        let stream = gen_heavy_stream(&spec, false).unwrap();
        let params = OnePassParams::new(eps, 20, f0 as f64, s);
        let out = one_pass_f0_robust(stream, 1 << 20, &params).unwrap();
        if within(out.estimate, f0 as f64, eps) {
            good += 1;
        }
    }
    outcome(good >= 85, format!("F0 = {f0}, C = 20: {good}/100 within (1±{eps})F0 (need 85)"))
}

fn c10_zipf_fit() -> Outcome {
    let mut worst: f64 = 0.0;
    for (c, s) in [(100.0, 2.0), (1404.68, 0.743), (5.0, 0.3)] {
        let fit = fit_zipf_real(&zipf_series(c, s, 500)).unwrap();
        worst = worst
            .max(((fit.exponent - s) / s).abs())
            .max(((fit.scale - c) / c).abs());
    }
    let mut pass = worst <= 1e-6;
    let mut detail = format!("synthetic worst relative error {worst:.2e} (≤ 1e-6)");
    match std::env::var_os("PF0_CAIDA_EDGES") {
        Some(path) => {
            let edges = load_edges(&path).unwrap();
            let d = partition_by_receiver(&edges).unwrap();
            let fit = fit_zipf(&senders_per_receiver(&edges)).unwrap();
            let senders = d.universe_size();
            let ok = within(fit.exponent, 0.743, 0.1)
                && within(fit.scale, 1404.68, 0.1)
                && senders == 42_200;
            pass &= ok;
            detail += &format!(
                "; extract: s = {:.4}, C = {:.2}, senders = {senders}",
                fit.exponent, fit.scale
            );
        }
        None => detail += "; no extract supplied (PF0_CAIDA_EDGES unset)",
    }
    outcome(pass, detail)
}

fn c11_determinism() -> Outcome {
    let mut mismatches = Vec::new();
    let workload = Workload::Zipf {
        exponent: 1.2,
        scale: 8.0,
        support: 3_000,
        alpha: 8,
        universe_size: 50_000,
    };
    for protocol in Protocol::ALL {
        let cfg = ExperimentConfig {
            protocol,
            eps_pows: 1..=3,
            seeds: 2,
            seed: 11,
            workload: workload.clone(),
            c_budget: None,
        };
        let run = || {
            let mut a = Vec::new();
            let mut b = Vec::new();
            run_comm_vs_eps(&cfg, &mut a).unwrap();
            run_accuracy_vs_eps(&cfg, &mut b).unwrap();
            (a, b)
        };
        if run() != run() {
            mismatches.push(protocol.name());
        }
    }
    let d = gen_planted(&PlantedSpec { f0_target: 2_000, collisions_target: 300, alpha: 5 }, 1 << 16, 1)
        .unwrap();
    let alg2 = |s| collision_bounded_f0(SimNetwork::new(&d, s), 0.2, 300).unwrap();
    if alg2(5) != alg2(5) {
        mismatches.push("alg2 ledger");
    }
    outcome(
        mismatches.is_empty(),
        format!("7 protocols, repeated runs byte-identical; mismatches: {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle identities", c1_oracles),
        ("algorithm 1 accuracy", c2_alg1_accuracy),
        ("algorithm 1 unbiasedness", c3_alg1_unbiased),
        ("algorithm 2 excess-mass correction", c4_alg2),
        ("communication scaling in sqrt(beta)", c5_sqrt_beta),
        ("duplication protocol", c6_duplication),
        ("countsketch tail bound", c7_countsketch),
        ("two-pass streaming", c8_two_pass),
        ("one-pass robust streaming", c9_one_pass),
        ("zipf fitting round trip", c10_zipf_fit),
        ("determinism", c11_determinism),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if let Some(f) = &filter {
            if !name.contains(f.as_str()) && f != &id.to_string() {
                continue;
            }
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {id:>2} {tag}  {name}: {} [{:.1?}]", o.detail, start.elapsed());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
