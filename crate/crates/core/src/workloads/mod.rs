//! Synthetic datasets and streams, edge-list ingestion and power-law fitting.

mod edges;
mod fit;
mod generators;

pub use edges::{
    activity_in_top_receiver, load_edges, partition_by_receiver, read_edges,
    senders_per_receiver, write_histogram_csv, EdgeRecord,
};
pub use fit::{fit_zipf, fit_zipf_real, zipf_series, ZipfFit};
pub use generators::{
    gen_duplicates, gen_heavy_stream, gen_planted, gen_replicated, gen_uniform,
    gen_zipfian_dataset, replication_count, HeavyStreamSpec, PlantedSpec, ZipfSpec,
};
