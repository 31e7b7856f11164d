//! Diagnostics for telling genuine concept-drift adaptation apart from
//! label autocorrelation on labelled data streams.
//!
//! The crate computes the naive bars any adaptive classifier should clear
//! (majority, persistence, and the analytic iid persistence bar), the
//! random-restart majority family that interpolates between them, label
//! autocorrelation and run-length statistics, synthetic Markov label
//! streams, and a prequential harness with an audit verdict.

pub mod baselines;
pub mod diagnostics;
pub mod error;
pub mod eval;
pub mod rng;
pub mod stream_io;
pub mod synth;

pub use error::{Error, Result};
pub use stream_io::{Label, StreamDataset};
