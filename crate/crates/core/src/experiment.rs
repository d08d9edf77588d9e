//! Batch experiments: communication and accuracy sweeps over `ε = 2^-p`,
//! written as CSV.
//!
//! Rows come out in `(p, seed)` order with `p` ascending, so `ε` runs from
//! large to small. Every run derives all randomness from its seed, hence the
//! same config always yields the same bytes.

use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use crate::coordinator::{
    collision_bounded_f0, constant_factor_f0, duplication_estimate, eps_approx_f0,
    DuplicationParams, SimNetwork,
};
use crate::error::{Error, Result};
use crate::model::{ground_truth, Dataset, GroundTruth};
use crate::streaming::{one_pass_f0_auto, two_pass_f0, two_pass_f0_small, LevelSetConfig};
use crate::workloads::{
    activity_in_top_receiver, fit_zipf, gen_planted, gen_zipfian_dataset, load_edges,
    partition_by_receiver, senders_per_receiver, write_histogram_csv, PlantedSpec, ZipfSpec,
};

/// Header of [`run_comm_vs_eps`] output.
pub const COMM_HEADER: &str =
    "protocol,eps,c_budget,seed,estimate,f0_true,rel_err,bits,rounds,baseline_bits_c0_1";
/// Header of [`run_accuracy_vs_eps`] output.
pub const ACCURACY_HEADER: &str = "protocol,eps,c_budget,seed,estimate,f0_true,rel_err,bits,rounds";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Constant-factor estimate.
    Const4,
    /// `(1 ± ε)` estimate from one level sample.
    Alg1,
    /// Collision-bounded estimate with excess-mass correction.
    Alg2,
    /// Number of items held by at least two players.
    Dup,
    /// One-pass robust streaming estimate.
    Stream1p,
    /// Two-pass streaming, many repeated items.
    Stream2p,
    /// Two-pass streaming, few repeated items.
    Stream2ps,
}

impl Protocol {
    pub const ALL: [Protocol; 7] = [
        Protocol::Const4,
        Protocol::Alg1,
        Protocol::Alg2,
        Protocol::Dup,
        Protocol::Stream1p,
        Protocol::Stream2p,
        Protocol::Stream2ps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Const4 => "const4",
            Protocol::Alg1 => "alg1",
            Protocol::Alg2 => "alg2",
            Protocol::Dup => "dup",
            Protocol::Stream1p => "stream1p",
            Protocol::Stream2p => "stream2p",
            Protocol::Stream2ps => "stream2ps",
        }
    }

    fn uses_budget(self) -> bool {
        !matches!(self, Protocol::Const4 | Protocol::Alg1)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown protocol {s:?}")))
    }
}

/// Where the dataset comes from. Synthetic workloads are generated once from
/// the experiment's base seed.
#[derive(Clone, Debug, PartialEq)]
pub enum Workload {
    Zipf {
        exponent: f64,
        scale: f64,
        support: u64,
        alpha: usize,
        universe_size: u64,
    },
    Planted {
        spec: PlantedSpec,
        universe_size: u64,
    },
    /// Two-column `sender,receiver` CSV.
    File(PathBuf),
}

impl Workload {
    pub fn build(&self, seed: u64) -> Result<Dataset> {
        match self {
            Workload::Zipf {
                exponent,
                scale,
                support,
                alpha,
                universe_size,
            } => gen_zipfian_dataset(
                &ZipfSpec {
                    exponent: *exponent,
                    scale: *scale,
                    support: *support,
                    seed,
                },
                *alpha,
                *universe_size,
            ),
            Workload::Planted {
                spec,
                universe_size,
            } => gen_planted(spec, *universe_size, seed),
            Workload::File(path) => partition_by_receiver(&load_edges(path)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    /// `ε = 2^-p` for each `p`.
    pub eps_pows: RangeInclusive<u32>,
    pub seeds: u64,
    /// Seed of the workload and of the first run; run `k` uses `seed + k`.
    pub seed: u64,
    pub workload: Workload,
    /// Collision budget for `alg2`, duplicate target for `dup`, repeated-item
    /// count for the streaming estimators. Defaults to the true value.
    pub c_budget: Option<u64>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::InvalidParameter("seeds must be at least 1".into()));
        }
        if self.eps_pows.is_empty() {
            return Err(Error::InvalidParameter("empty eps range".into()));
        }
        if *self.eps_pows.end() > 60 {
            return Err(Error::InvalidParameter("eps exponent above 60".into()));
        }
        Ok(())
    }

    pub fn eps_values(&self) -> Vec<f64> {
        self.eps_pows.clone().map(|p| 2f64.powi(-(p as i32))).collect()
    }
}

/// One protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub protocol: Protocol,
    pub eps: f64,
    pub c_budget: Option<u64>,
    pub seed: u64,
    pub estimate: f64,
    /// The quantity being estimated: `F0`, or the duplicate count for `dup`.
    pub f0_true: u64,
    pub rel_err: f64,
    /// Ledger total for coordinator protocols, sketch space for streaming.
    pub bits: u64,
    /// Rounds for coordinator protocols, passes for streaming.
    pub rounds: u32,
}

impl Row {
    fn fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.eps,
            self.c_budget.map(|c| c.to_string()).unwrap_or_default(),
            self.seed,
            self.estimate,
            self.f0_true,
            self.rel_err,
            self.bits,
            self.rounds
        )
    }
}

pub fn rel_err(estimate: f64, truth: u64) -> f64 {
    if truth == 0 {
        if estimate == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (estimate - truth as f64).abs() / truth as f64
    }
}

/// Items held by at least two players.
fn repeated_items(gt: &GroundTruth) -> u64 {
    gt.multiplicity_histogram.range(2..).map(|(_, &k)| k).sum()
}

/// Runs `protocol` once on `d`.
pub fn run_protocol(
    protocol: Protocol,
    d: &Dataset,
    gt: &GroundTruth,
    eps: f64,
    c_budget: Option<u64>,
    seed: u64,
) -> Result<Row> {
    let n = d.universe_size();
    let net = || SimNetwork::new(d, seed);
    let budget = match protocol {
        Protocol::Alg2 => c_budget.unwrap_or(gt.pairwise_collisions),
        Protocol::Dup => c_budget.unwrap_or(repeated_items(gt)).max(1),
        Protocol::Stream1p | Protocol::Stream2p => c_budget.unwrap_or(repeated_items(gt)),
        _ => c_budget.unwrap_or(0),
    };
    let mut truth = gt.f0;
    let (estimate, bits, rounds) = match protocol {
        Protocol::Const4 => {
            let r = constant_factor_f0(net())?;
            (r.estimate, r.bits_used, r.rounds)
        }
        Protocol::Alg1 => {
            let r = eps_approx_f0(net(), eps)?;
            (r.estimate, r.bits_used, r.rounds)
        }
        Protocol::Alg2 => {
            let r = collision_bounded_f0(net(), eps, budget)?;
            (r.estimate, r.bits_used, r.rounds)
        }
        Protocol::Dup => {
            truth = repeated_items(gt);
            let r = duplication_estimate(net(), DuplicationParams::new(eps, budget))?;
            (r.estimate, r.bits_used, r.rounds)
        }
        Protocol::Stream1p => {
            let o = one_pass_f0_auto(d.to_stream(), n, eps, budget, seed)?;
            (o.estimate, o.space_bits, 1)
        }
        Protocol::Stream2p => {
            let cfg = LevelSetConfig::large_c(n, eps, budget);
            let o = two_pass_f0(d.to_stream(), d.to_stream(), &cfg, seed)?;
            (o.estimate, o.space_bits, 2)
        }
        Protocol::Stream2ps => {
            let cfg = LevelSetConfig::small_c(n, eps);
            let o = two_pass_f0_small(d.to_stream(), d.to_stream(), &cfg, seed)?;
            (o.estimate, o.space_bits, 2)
        }
    };
    Ok(Row {
        protocol,
        eps,
        c_budget: protocol
            .uses_budget()
            .then_some(budget)
            .filter(|_| protocol != Protocol::Stream2ps),
        seed,
        estimate,
        f0_true: truth,
        rel_err: rel_err(estimate, truth),
        bits,
        rounds,
    })
}

fn sweep(cfg: &ExperimentConfig) -> Result<(Dataset, Vec<Row>)> {
    cfg.validate()?;
    let d = cfg.workload.build(cfg.seed)?;
    let gt = ground_truth(&d);
    let mut rows = Vec::new();
    for eps in cfg.eps_values() {
        for k in 0..cfg.seeds {
            let seed = cfg.seed.wrapping_add(k);
            rows.push(run_protocol(cfg.protocol, &d, &gt, eps, cfg.c_budget, seed)?);
        }
    }
    Ok((d, rows))
}

/// The comparator `α · (1/ε² + log2 n)` with unit constants.
pub fn baseline_bits(alpha: usize, eps: f64, universe_size: u64) -> f64 {
    alpha as f64 * (1.0 / (eps * eps) + (universe_size.max(2) as f64).log2())
}

/// One row per `(ε, seed)` with the measured bits next to the baseline.
pub fn run_comm_vs_eps<W: Write>(cfg: &ExperimentConfig, mut out: W) -> Result<Vec<Row>> {
    let (d, rows) = sweep(cfg)?;
    writeln!(out, "{COMM_HEADER}")?;
    for r in &rows {
        let base = baseline_bits(d.alpha(), r.eps, d.universe_size());
        writeln!(out, "{},{}", r.fields(), base)?;
    }
    out.flush()?;
    Ok(rows)
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// One row per `(ε, seed)`, then a row per `ε` with `seed = median` carrying
/// the median relative error.
pub fn run_accuracy_vs_eps<W: Write>(cfg: &ExperimentConfig, mut out: W) -> Result<Vec<Row>> {
    let (_, rows) = sweep(cfg)?;
    writeln!(out, "{ACCURACY_HEADER}")?;
    for chunk in rows.chunks(cfg.seeds as usize) {
        for r in chunk {
            writeln!(out, "{}", r.fields())?;
        }
        let first = &chunk[0];
        let mut errs: Vec<f64> = chunk.iter().map(|r| r.rel_err).collect();
        writeln!(
            out,
            "{},{},{},median,,{},{},,",
            first.protocol,
            first.eps,
            first.c_budget.map(|c| c.to_string()).unwrap_or_default(),
            first.f0_true,
            median(&mut errs)
        )?;
    }
    out.flush()?;
    Ok(rows)
}

/// Histograms of an edge file plus their power-law fits.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramReport {
    pub senders_per_receiver: Vec<u64>,
    pub top_receiver_activity: Vec<u64>,
    pub distinct_senders: u64,
    /// `(exponent, scale)` per histogram; `None` when too short to fit.
    pub fits: [Option<(f64, f64)>; 2],
}

/// Writes `senders_per_receiver.csv`, `top_receiver_activity.csv` and
/// `zipf_fit.csv` into `out_dir`.
pub fn run_histograms(edges: &std::path::Path, out_dir: &std::path::Path) -> Result<HistogramReport> {
    let records = load_edges(edges)?;
    let d = partition_by_receiver(&records)?;
    let per_receiver = senders_per_receiver(&records);
    let activity = activity_in_top_receiver(&records);
    let fit = |h: &[u64]| fit_zipf(h).ok().map(|f| (f.exponent, f.scale));
    let report = HistogramReport {
        fits: [fit(&per_receiver), fit(&activity)],
        distinct_senders: d.universe_size(),
        senders_per_receiver: per_receiver,
        top_receiver_activity: activity,
    };
    std::fs::create_dir_all(out_dir)?;
    write_histogram_csv(
        std::fs::File::create(out_dir.join("senders_per_receiver.csv"))?,
        &report.senders_per_receiver,
    )?;
    write_histogram_csv(
        std::fs::File::create(out_dir.join("top_receiver_activity.csv"))?,
        &report.top_receiver_activity,
    )?;
    let mut f = std::fs::File::create(out_dir.join("zipf_fit.csv"))?;
    writeln!(f, "histogram,exponent,scale,distinct_senders")?;
    for (name, fit) in ["senders_per_receiver", "top_receiver_activity"]
        .iter()
        .zip(report.fits)
    {
        match fit {
            Some((s, c)) => writeln!(f, "{name},{s},{c},{}", report.distinct_senders)?,
            None => writeln!(f, "{name},,,{}", report.distinct_senders)?,
        }
    }
    Ok(report)
}
