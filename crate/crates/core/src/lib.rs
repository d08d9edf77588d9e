//! Distinct-element estimation parameterized by pairwise collisions.
//!
//! `α` players each hold a set of ids from `[0, n)`. The crate estimates the
//! number of distinct ids `F0` held across all players, both in a simulated
//! coordinator model with exact bit accounting ([`coordinator`]) and over a
//! single insertion stream ([`streaming`]). Exact oracles live in [`model`],
//! dataset generators and edge-list ingestion in [`workloads`], and the
//! experiment drivers behind the `pf0` binary in [`experiment`].
//!
//! ```
//! use pairwise_f0::coordinator::{eps_approx_f0, SimNetwork};
//! use pairwise_f0::model::{f0_exact, Dataset};
//!
//! let d = Dataset::new(1_000, vec![vec![1, 2, 3], vec![3, 4], vec![4, 5, 6]]).unwrap();
//! let r = eps_approx_f0(SimNetwork::new(&d, 7), 0.5).unwrap();
//! // Few items: every one of them is sent, the answer is exact.
//! assert_eq!(r.estimate, f0_exact(&d) as f64);
//! assert_eq!(r.bits_used, r.ledger.total_bits());
//! ```

pub mod coordinator;
pub mod error;
pub mod experiment;
pub mod model;
pub mod sampling;
pub mod streaming;
pub mod workloads;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/coordinator.md")]
    mod coordinator {}
    #[doc = include_str!("../../../book/src/duplication.md")]
    mod duplication {}
    #[doc = include_str!("../../../book/src/streaming.md")]
    mod streaming {}
    #[doc = include_str!("../../../book/src/workloads.md")]
    mod workloads {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
