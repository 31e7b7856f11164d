//! Label-level statistics that expose autocorrelation in a stream: class
//! priors, the iid persistence bar, the observed persistence bar, run
//! lengths and the sample autocorrelation function.

use std::io::Write;

use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::stream_io::{Label, StreamDataset};

/// What to predict before any label has been observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColdStart {
    /// The first class in schema order (`Label(0)`).
    #[default]
    SchemaFirst,
    /// The label of the first instance. This peeks at one label and makes
    /// the first prediction always correct.
    FirstObserved,
    Fixed(Label),
}

impl ColdStart {
    pub fn resolve(self, labels: &[Label]) -> Label {
        match self {
            ColdStart::SchemaFirst => Label(0),
            ColdStart::FirstObserved => labels.first().copied().unwrap_or(Label(0)),
            ColdStart::Fixed(l) => l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelDistribution {
    pub n: usize,
    pub counts: Vec<usize>,
    pub frequencies: Vec<f64>,
}

impl LabelDistribution {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    /// Index of the most frequent class; ties go to the earlier class.
    pub fn majority(&self) -> Label {
        let mut best = 0;
        for (c, &k) in self.counts.iter().enumerate() {
            if k > self.counts[best] {
                best = c;
            }
        }
        Label(best)
    }
}

/// Counts labels over `n_classes` classes (widened if a label is out of range).
pub fn label_distribution(labels: &[Label], n_classes: usize) -> Result<LabelDistribution> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    let k = labels
        .iter()
        .map(|l| l.0 + 1)
        .max()
        .unwrap_or(0)
        .max(n_classes);
    let mut counts = vec![0usize; k];
    for l in labels {
        counts[l.0] += 1;
    }
    let n = labels.len();
    let frequencies = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(LabelDistribution {
        n,
        counts,
        frequencies,
    })
}

/// Σ p(c)²: the chance that two independent draws agree, i.e. the expected
/// persistence accuracy on an iid stream with these priors.
pub fn independence_bar(dist: &LabelDistribution) -> f64 {
    dist.frequencies.iter().map(|p| p * p).sum()
}

/// Accuracy of predicting each label as the previous one, scored over all n
/// instances (the first prediction comes from `cold_start`).
pub fn persistence_accuracy(labels: &[Label], cold_start: ColdStart) -> Result<f64> {
    let first = *labels.first().ok_or(Error::EmptyStream)?;
    let mut correct = usize::from(cold_start.resolve(labels) == first);
    correct += labels.windows(2).filter(|w| w[0] == w[1]).count();
    Ok(correct as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfSeries {
    /// Lags 1..=max_lag.
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
}

impl AcfSeries {
    pub fn max_lag(&self) -> usize {
        self.lags.len()
    }

    /// Coefficient at `lag` (1-based).
    pub fn at(&self, lag: usize) -> Option<f64> {
        lag.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lag,acf")?;
        for (lag, r) in self.lags.iter().zip(&self.values) {
            writeln!(out, "{lag},{r}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Maps a binary label sequence to 0/1 in class-index order.
fn binary_encode(labels: &[Label]) -> Result<Vec<f64>> {
    let mut distinct: Vec<Label> = Vec::with_capacity(2);
    for &l in labels {
        if !distinct.contains(&l) {
            distinct.push(l);
            if distinct.len() > 2 {
                let mut all: Vec<Label> = labels.to_vec();
                all.sort_unstable();
                all.dedup();
                return Err(Error::NotBinary(all.len()));
            }
        }
    }
    if distinct.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    let high = distinct[0].max(distinct[1]);
    Ok(labels
        .iter()
        .map(|&l| if l == high { 1.0 } else { 0.0 })
        .collect())
}

fn lag_coefficient(centered: &[f64], denom: f64, lag: usize) -> f64 {
    let num: f64 = centered
        .iter()
        .zip(&centered[lag..])
        .map(|(a, b)| a * b)
        .sum();
    num / denom
}

/// Sample autocorrelation of a binary label stream for lags 1..=max_lag,
/// normalised by the full-series sum of squares.
pub fn autocorrelation(labels: &[Label], max_lag: usize) -> Result<AcfSeries> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    if max_lag == 0 {
        return Err(Error::InvalidConfig("max lag must be positive".into()));
    }
    let x = binary_encode(labels)?;
    let n = x.len();
    if max_lag >= n {
        return Err(Error::LagTooLarge { max_lag, n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = centered.iter().map(|v| v * v).sum();
    // Each lag is an independent sequential sum, so the parallel map is
    // bitwise identical to a sequential loop.
    let values = (1..=max_lag)
        .into_par_iter()
        .map(|k| lag_coefficient(&centered, denom, k))
        .collect();
    Ok(AcfSeries {
        lags: (1..=max_lag).collect(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunStats {
    pub count: usize,
    pub mean: f64,
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunLengths {
    #[serde(flatten)]
    pub overall: RunStats,
    /// Indexed by class; classes with no runs have count 0 and mean 0.
    pub per_class: Vec<RunStats>,
}

fn stats(lengths: &[usize]) -> RunStats {
    let total: usize = lengths.iter().sum();
    RunStats {
        count: lengths.len(),
        mean: if lengths.is_empty() {
            0.0
        } else {
            total as f64 / lengths.len() as f64
        },
        max: lengths.iter().copied().max().unwrap_or(0),
    }
}

/// Maximal constant-label runs.
pub fn run_lengths(labels: &[Label]) -> Result<RunLengths> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    let mut runs: Vec<(Label, usize)> = Vec::new();
    for &l in labels {
        match runs.last_mut() {
            Some((cur, len)) if *cur == l => *len += 1,
            _ => runs.push((l, 1)),
        }
    }
    let k = labels.iter().map(|l| l.0 + 1).max().unwrap_or(0);
    let all: Vec<usize> = runs.iter().map(|r| r.1).collect();
    let per_class = (0..k)
        .map(|c| {
            let ls: Vec<usize> = runs
                .iter()
                .filter(|r| r.0 == Label(c))
                .map(|r| r.1)
                .collect();
            stats(&ls)
        })
        .collect();
    Ok(RunLengths {
        overall: stats(&all),
        per_class,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub class_values: Vec<String>,
    pub distribution: LabelDistribution,
    pub independence_bar: f64,
    pub persistence_bar: f64,
    pub run_lengths: RunLengths,
    pub acf: Option<AcfSeries>,
    /// Why the ACF was left out, when it was.
    pub acf_omitted: Option<String>,
}

struct Priors<'a>(&'a [String], &'a [f64]);

impl Serialize for Priors<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (name, p) in self.0.iter().zip(self.1) {
            map.serialize_entry(name, p)?;
        }
        map.end()
    }
}

impl Serialize for DiagnosticsReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DiagnosticsReport", 7)?;
        st.serialize_field("n", &self.distribution.n)?;
        st.serialize_field(
            "class_priors",
            &Priors(&self.class_values, &self.distribution.frequencies),
        )?;
        st.serialize_field("independence_bar", &self.independence_bar)?;
        st.serialize_field("persistence_bar", &self.persistence_bar)?;
        st.serialize_field("run_lengths", &self.run_lengths.overall)?;
        st.serialize_field("acf", &self.acf.as_ref().map(|a| &a.values))?;
        st.serialize_field("acf_omitted", &self.acf_omitted)?;
        st.end()
    }
}

/// Assembles the full label report. Degenerate ACF inputs (one class, more
/// than two classes, too-short stream) leave `acf` empty and flagged; an
/// empty dataset is an error.
pub fn diagnose(ds: &StreamDataset, max_lag: usize, cold_start: ColdStart) -> Result<DiagnosticsReport> {
    let labels = ds.labels();
    let distribution = label_distribution(&labels, ds.n_classes())?;
    let (acf, acf_omitted) = match autocorrelation(&labels, max_lag) {
        Ok(a) => (Some(a), None),
        Err(e @ (Error::ZeroVariance | Error::NotBinary(_) | Error::LagTooLarge { .. })) => {
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    Ok(DiagnosticsReport {
        class_values: ds.schema().class_values().to_vec(),
        independence_bar: independence_bar(&distribution),
        persistence_bar: persistence_accuracy(&labels, cold_start)?,
        run_lengths: run_lengths(&labels)?,
        distribution,
        acf,
        acf_omitted,
    })
}
