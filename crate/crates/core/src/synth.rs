//! Synthetic binary label streams from a two-state Markov chain.
//!
//! The chain is parameterised by the stationary probability `p` of class 1
//! and its lag-1 autocorrelation `λ`. Switching probabilities are
//! `P(1 -> 0) = (1 - p)(1 - λ)` and `P(0 -> 1) = p (1 - λ)`, which keeps the
//! stationary distribution at `(1 - p, p)`. `λ = 0` is the iid stream.
//!
//! Each step consumes one uniform draw `u`; the next label is class 1 iff
//! `u < P(next = 1 | current)`. The first label is class 1 iff `u < p`.
//! Because of this convention an iid chain and [`gen_iid_labels`] produce
//! the same sequence for the same seed.

use std::io::Write;

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stream_io::{Attribute, FeatureValue, Instance, Label, Schema, StreamDataset};

/// Class names used for synthetic streams: index 0 is "0", index 1 is "1".
pub const CLASS_NAMES: [&str; 2] = ["0", "1"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovLabelModel {
    prior: f64,
    acf1: f64,
    pub seed: u64,
    pub n: usize,
}

impl MarkovLabelModel {
    /// `prior` must lie in (0, 1); `acf1` in `[1 - 1/max(p, 1-p), 1)`.
    pub fn new(prior: f64, acf1: f64, seed: u64, n: usize) -> Result<Self> {
        if !(prior > 0.0 && prior < 1.0) {
            return Err(Error::InvalidModel(format!("prior {prior} must be in (0, 1)")));
        }
        if !acf1.is_finite() || acf1 >= 1.0 {
            return Err(Error::InvalidModel(format!("lag-1 autocorrelation {acf1} must be below 1")));
        }
        let lower = 1.0 - 1.0 / prior.max(1.0 - prior);
        if acf1 < lower - 1e-12 {
            return Err(Error::InvalidModel(format!(
                "lag-1 autocorrelation {acf1} is infeasible for prior {prior} (minimum {lower})"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidModel("stream length must be at least 1".into()));
        }
        Ok(MarkovLabelModel {
            prior,
            acf1,
            seed,
            n,
        })
    }

    /// Builds the chain from the overall probability that consecutive
    /// labels agree, `s = 1 - 2 p (1 - p)(1 - λ)`.
    pub fn from_stay(prior: f64, stay: f64, seed: u64, n: usize) -> Result<Self> {
        if !(prior > 0.0 && prior < 1.0) {
            return Err(Error::InvalidModel(format!("prior {prior} must be in (0, 1)")));
        }
        if !(0.0..1.0).contains(&stay) {
            return Err(Error::InvalidModel(format!("stay probability {stay} must be in [0, 1)")));
        }
        let acf1 = 1.0 - (1.0 - stay) / (2.0 * prior * (1.0 - prior));
        Self::new(prior, acf1, seed, n)
    }

    pub fn iid(prior: f64, seed: u64, n: usize) -> Result<Self> {
        Self::new(prior, 0.0, seed, n)
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn acf1(&self) -> f64 {
        self.acf1
    }

    /// Probability of staying in class 1 and in class 0.
    pub fn stay_probabilities(&self) -> (f64, f64) {
        let p = self.prior;
        let free = 1.0 - self.acf1;
        (1.0 - (1.0 - p) * free, 1.0 - p * free)
    }

    /// Overall probability that two consecutive labels agree.
    pub fn stay(&self) -> f64 {
        1.0 - 2.0 * self.prior * (1.0 - self.prior) * (1.0 - self.acf1)
    }
}

pub fn gen_markov_labels(model: &MarkovLabelModel) -> Vec<Label> {
    let (stay1, stay0) = model.stay_probabilities();
    let to_one_from_zero = 1.0 - stay0;
    let mut rng = StreamRng::new(model.seed);
    let mut out = Vec::with_capacity(model.n);
    let mut cur = rng.uniform() < model.prior;
    out.push(Label(usize::from(cur)));
    for _ in 1..model.n {
        let p_one = if cur { stay1 } else { to_one_from_zero };
        cur = rng.uniform() < p_one;
        out.push(Label(usize::from(cur)));
    }
    out
}

/// `n` independent draws with P(class 1) = `prior`; `prior` may be 0 or 1.
pub fn gen_iid_labels(prior: f64, n: usize, seed: u64) -> Result<Vec<Label>> {
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidModel(format!("prior {prior} must be in [0, 1]")));
    }
    if n == 0 {
        return Err(Error::InvalidModel("stream length must be at least 1".into()));
    }
    let mut rng = StreamRng::new(seed);
    Ok((0..n)
        .map(|_| Label(usize::from(rng.uniform() < prior)))
        .collect())
}

/// Wraps labels in a dataset with a single constant numeric feature.
pub fn to_dataset(labels: &[Label]) -> Result<StreamDataset> {
    let schema = Schema::new(
        vec![
            Attribute::numeric("const"),
            Attribute::nominal("label", CLASS_NAMES.iter().map(|s| s.to_string()).collect())?,
        ],
        1,
    )?;
    let instances = labels
        .iter()
        .map(|&label| Instance {
            features: vec![FeatureValue::Numeric(0.0)],
            label,
        })
        .collect();
    StreamDataset::new(schema, instances)
}

/// Single-column CSV with a `label` header, preceded by a comment line that
/// records how the stream was generated.
pub fn write_labels_csv<W: Write>(labels: &[Label], provenance: &str, mut out: W) -> Result<()> {
    writeln!(out, "# {provenance}")?;
    writeln!(out, "label")?;
    for l in labels {
        writeln!(out, "{}", CLASS_NAMES[l.0])?;
    }
    out.flush()?;
    Ok(())
}

/// Minimal ARFF: one class attribute `label {0,1}`.
pub fn write_labels_arff<W: Write>(labels: &[Label], provenance: &str, mut out: W) -> Result<()> {
    writeln!(out, "% {provenance}")?;
    writeln!(out, "@relation synthetic_labels")?;
    writeln!(out, "@attribute label {{0,1}}")?;
    writeln!(out, "@data")?;
    for l in labels {
        writeln!(out, "{}", CLASS_NAMES[l.0])?;
    }
    out.flush()?;
    Ok(())
}
