//! Streaming estimators of `F0` for insertion-only streams.

mod countsketch;
pub mod io;
mod one_pass;
mod robust;
mod two_pass;

pub use countsketch::CountSketch;
pub use one_pass::{one_pass_f0_auto, one_pass_f0_robust, OnePassOutcome, OnePassParams};
pub use robust::robust_mean_est;
pub use two_pass::{
    two_pass_f0, two_pass_f0_small, LevelSetConfig, Regime, SamplingRule, TwoPassOutcome,
};
