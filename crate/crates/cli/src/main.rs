//! `pf0`: experiment runner emitting CSV.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pairwise_f0::experiment::{
    rel_err, run_accuracy_vs_eps, run_comm_vs_eps, run_histograms, ExperimentConfig, Protocol,
    Workload,
};
use pairwise_f0::model::Dataset;
use pairwise_f0::streaming::io::{read_stream, write_stream, StreamFormat};
use pairwise_f0::streaming::{
    one_pass_f0_auto, two_pass_f0, two_pass_f0_small, LevelSetConfig,
};
use pairwise_f0::workloads::PlantedSpec;

#[derive(Parser)]
#[command(name = "pf0", version, about = "Distinct-element estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measured bits per (eps, seed) next to the α(1/ε² + log2 n) baseline.
    CommVsEps(SweepArgs),
    /// Relative error per (eps, seed) plus a median row per eps.
    AccuracyVsEps(SweepArgs),
    /// Rank/count histograms of an edge file and their power-law fits.
    Histograms {
        /// Two-column sender,receiver CSV.
        #[arg(long)]
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Writes a generated dataset in the text format.
    GenDataset {
        #[command(flatten)]
        workload: WorkloadArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a generated dataset as a stream, shard after shard.
    GenStream {
        #[command(flatten)]
        workload: WorkloadArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Lines)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a streaming estimator over a stream file.
    Stream {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Lines)]
        format: FormatArg,
        /// stream1p, stream2p or stream2ps.
        #[arg(long, default_value = "stream2ps")]
        protocol: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Number of repeated items assumed by stream1p and stream2p.
        #[arg(long, default_value_t = 1)]
        c_budget: u64,
        /// Universe size; defaults to the largest id plus one.
        #[arg(long)]
        universe: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Lines,
    Binary,
}

impl From<FormatArg> for StreamFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Lines => StreamFormat::Lines,
            FormatArg::Binary => StreamFormat::Binary,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkloadKind {
    Zipf,
    Planted,
    File,
}

#[derive(Args)]
struct WorkloadArgs {
    #[arg(long, value_enum, default_value_t = WorkloadKind::Planted)]
    workload: WorkloadKind,
    /// Universe size n.
    #[arg(long, default_value_t = 1_000_000)]
    universe: u64,
    /// Number of players.
    #[arg(long, default_value_t = 16)]
    alpha: usize,
    /// Zipf exponent s.
    #[arg(long, default_value_t = 1.5)]
    zipf_s: f64,
    /// Zipf scale C_z; defaults to alpha.
    #[arg(long)]
    zipf_scale: Option<f64>,
    /// Distinct items of a zipf workload.
    #[arg(long, default_value_t = 10_000)]
    support: u64,
    /// Distinct items of a planted workload.
    #[arg(long, default_value_t = 10_000)]
    f0: u64,
    /// Items on exactly two players in a planted workload.
    #[arg(long, default_value_t = 0)]
    collisions: u64,
    /// Edge CSV of a file workload.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl WorkloadArgs {
    fn workload(&self) -> Result<Workload> {
        Ok(match self.workload {
            WorkloadKind::Zipf => Workload::Zipf {
                exponent: self.zipf_s,
                scale: self.zipf_scale.unwrap_or(self.alpha as f64),
                support: self.support,
                alpha: self.alpha,
                universe_size: self.universe,
            },
            WorkloadKind::Planted => Workload::Planted {
                spec: PlantedSpec {
                    f0_target: self.f0,
                    collisions_target: self.collisions,
                    alpha: self.alpha,
                },
                universe_size: self.universe,
            },
            WorkloadKind::File => Workload::File(
                self.input
                    .clone()
                    .context("--workload file needs --input")?,
            ),
        })
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    protocol: String,
    /// Inclusive exponent range `a..b`; eps = 2^-p.
    #[arg(long, default_value = "0..11", value_parser = parse_pows)]
    eps_pows: RangeInclusive<u32>,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Collision budget (alg2), duplicate target (dup) or repeated items
    /// (stream1p, stream2p). Defaults to the true value.
    #[arg(long)]
    c_budget: Option<u64>,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            protocol: self.protocol.parse()?,
            eps_pows: self.eps_pows.clone(),
            seeds: self.seeds,
            seed: self.seed,
            workload: self.workload.workload()?,
            c_budget: self.c_budget,
        })
    }
}

fn parse_pows(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::CommVsEps(args) => {
            run_comm_vs_eps(&args.config()?, output(&args.out)?)?;
        }
        Command::AccuracyVsEps(args) => {
            run_accuracy_vs_eps(&args.config()?, output(&args.out)?)?;
        }
        Command::Histograms { input, out } => {
            let report = run_histograms(&input, &out)?;
            eprintln!(
                "{} receivers, {} distinct senders",
                report.senders_per_receiver.len(),
                report.distinct_senders
            );
        }
        Command::GenDataset {
            workload,
            seed,
            out,
        } => {
            workload.workload()?.build(seed)?.write_text(output(&out)?)?;
        }
        Command::GenStream {
            workload,
            seed,
            format,
            out,
        } => {
            let d: Dataset = workload.workload()?.build(seed)?;
            write_stream(output(&out)?, d.to_stream(), format.into())?;
        }
        Command::Stream {
            input,
            format,
            protocol,
            eps,
            c_budget,
            universe,
            seed,
        } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let items = read_stream(BufReader::new(file), format.into())?;
            let n = match universe {
                Some(n) => n,
                None => items.iter().max().map_or(1, |&m| m + 1),
            };
            let protocol: Protocol = protocol.parse()?;
            let (estimate, bits, passes) = match protocol {
                Protocol::Stream1p => {
                    let o = one_pass_f0_auto(items.iter().copied(), n, eps, c_budget, seed)?;
                    (o.estimate, o.space_bits, 1)
                }
                Protocol::Stream2p => {
                    let cfg = LevelSetConfig::large_c(n, eps, c_budget);
                    let o = two_pass_f0(items.iter().copied(), items.iter().copied(), &cfg, seed)?;
                    (o.estimate, o.space_bits, 2)
                }
                Protocol::Stream2ps => {
                    let cfg = LevelSetConfig::small_c(n, eps);
                    let o = two_pass_f0_small(items.iter().copied(), items.iter().copied(), &cfg, seed)?;
                    (o.estimate, o.space_bits, 2)
                }
                other => bail!("{other} is not a streaming estimator"),
            };
            let mut distinct = items.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let truth = distinct.len() as u64;
            let mut out = output(&None)?;
            writeln!(out, "protocol,eps,seed,estimate,f0_true,rel_err,bits,passes")?;
            writeln!(
                out,
                "{protocol},{eps},{seed},{estimate},{truth},{},{bits},{passes}",
                rel_err(estimate, truth)
            )?;
            out.flush()?;
        }
    }
    Ok(())
}
