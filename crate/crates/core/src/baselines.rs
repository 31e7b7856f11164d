//! Label-only naive classifiers: incremental majority, and majority with
//! random restarts.
//!
//! The restart classifier keeps class counts over a window that starts at
//! its last alarm. After observing each instance it fires an alarm with
//! probability `rho`; an alarm clears the window and re-inserts the label
//! just observed. At `rho = 0` this is the incremental majority classifier
//! and at `rho = 1` the window always holds exactly the previous label, so
//! it predicts like the persistence baseline.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::ColdStart;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, StreamRng};
use crate::stream_io::Label;

/// How to break ties between equally frequent classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Prefer the tied class observed most recently.
    #[default]
    MostRecent,
    /// Prefer the tied class that comes first in schema order.
    SchemaOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BaselineOptions {
    pub cold_start: ColdStart,
    pub tie_break: TieBreak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartPolicy {
    rho: f64,
    pub seed: u64,
}

impl RestartPolicy {
    pub fn new(rho: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidRho(rho));
        }
        Ok(RestartPolicy { rho, seed })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

fn argmax(counts: &[usize], last_seen: &[usize], tie: TieBreak) -> Option<Label> {
    let mut best: Option<usize> = None;
    for c in 0..counts.len() {
        if counts[c] == 0 {
            continue;
        }
        best = match best {
            None => Some(c),
            Some(b) if counts[c] > counts[b] => Some(c),
            Some(b) if counts[c] == counts[b] && tie == TieBreak::MostRecent && last_seen[c] > last_seen[b] => {
                Some(c)
            }
            keep => keep,
        };
    }
    best.map(Label)
}

fn class_count(labels: &[Label], cold: Label) -> usize {
    labels
        .iter()
        .map(|l| l.0 + 1)
        .max()
        .unwrap_or(0)
        .max(cold.0 + 1)
}

/// Majority over every label seen so far.
#[derive(Debug, Clone)]
pub struct IncrementalMajority {
    counts: Vec<usize>,
    last_seen: Vec<usize>,
    seen: usize,
    cold: Label,
    tie: TieBreak,
}

impl IncrementalMajority {
    pub fn new(n_classes: usize, cold: Label, tie: TieBreak) -> Self {
        let k = n_classes.max(cold.0 + 1);
        IncrementalMajority {
            counts: vec![0; k],
            last_seen: vec![0; k],
            seen: 0,
            cold,
            tie,
        }
    }

    pub fn predict(&self) -> Label {
        argmax(&self.counts, &self.last_seen, self.tie).unwrap_or(self.cold)
    }

    pub fn observe(&mut self, label: Label) {
        if label.0 >= self.counts.len() {
            self.counts.resize(label.0 + 1, 0);
            self.last_seen.resize(label.0 + 1, 0);
        }
        self.seen += 1;
        self.counts[label.0] += 1;
        self.last_seen[label.0] = self.seen;
    }

    pub fn reset(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.last_seen.iter_mut().for_each(|c| *c = 0);
        self.seen = 0;
    }
}

/// Windowed majority that restarts at random alarms.
#[derive(Debug, Clone)]
pub struct RestartMajority {
    window: Vec<usize>,
    window_len: usize,
    last_seen: Vec<usize>,
    last: Option<Label>,
    seen: usize,
    cold: Label,
    tie: TieBreak,
    policy: RestartPolicy,
    rng: StreamRng,
    alarms: usize,
}

impl RestartMajority {
    pub fn new(n_classes: usize, cold: Label, tie: TieBreak, policy: RestartPolicy) -> Self {
        let k = n_classes.max(cold.0 + 1);
        RestartMajority {
            window: vec![0; k],
            window_len: 0,
            last_seen: vec![0; k],
            last: None,
            seen: 0,
            cold,
            tie,
            policy,
            rng: StreamRng::new(policy.seed),
            alarms: 0,
        }
    }

    pub fn predict(&self) -> Label {
        match self.last {
            None => self.cold,
            Some(last) if self.window_len == 0 => last,
            Some(_) => argmax(&self.window, &self.last_seen, self.tie).expect("window non-empty"),
        }
    }

    /// Trains on `label`, then draws the alarm for this instance.
    pub fn observe(&mut self, label: Label) {
        if label.0 >= self.window.len() {
            self.window.resize(label.0 + 1, 0);
            self.last_seen.resize(label.0 + 1, 0);
        }
        self.seen += 1;
        self.window[label.0] += 1;
        self.window_len += 1;
        self.last_seen[label.0] = self.seen;
        self.last = Some(label);
        if self.rng.bernoulli(self.policy.rho) {
            self.alarms += 1;
            self.window.iter_mut().for_each(|c| *c = 0);
            self.window[label.0] = 1;
            self.window_len = 1;
        }
    }

    pub fn alarms(&self) -> usize {
        self.alarms
    }

    /// Back to the freshly constructed state, including the generator.
    pub fn reset(&mut self) {
        *self = RestartMajority::new(self.window.len(), self.cold, self.tie, self.policy);
    }
}

/// Fraction of positions where `predictions` matches `labels`.
pub fn score(labels: &[Label], predictions: &[Label]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    assert_eq!(labels.len(), predictions.len(), "trace length mismatch");
    let correct = labels.iter().zip(predictions).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / labels.len() as f64)
}

pub fn majority_trace(labels: &[Label], opts: BaselineOptions) -> Result<Vec<Label>> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    let cold = opts.cold_start.resolve(labels);
    let mut m = IncrementalMajority::new(class_count(labels, cold), cold, opts.tie_break);
    Ok(labels
        .iter()
        .map(|&l| {
            let p = m.predict();
            m.observe(l);
            p
        })
        .collect())
}

/// Prequential accuracy of the incremental majority classifier.
pub fn majority_baseline(labels: &[Label], opts: BaselineOptions) -> Result<f64> {
    score(labels, &majority_trace(labels, opts)?)
}

pub fn random_restart_trace(
    labels: &[Label],
    policy: RestartPolicy,
    opts: BaselineOptions,
) -> Result<Vec<Label>> {
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    let cold = opts.cold_start.resolve(labels);
    let mut m = RestartMajority::new(class_count(labels, cold), cold, opts.tie_break, policy);
    Ok(labels
        .iter()
        .map(|&l| {
            let p = m.predict();
            m.observe(l);
            p
        })
        .collect())
}

/// Prequential accuracy of the random-restart majority classifier.
pub fn random_restart_run(labels: &[Label], policy: RestartPolicy, opts: BaselineOptions) -> Result<f64> {
    score(labels, &random_restart_trace(labels, policy, opts)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub rho_grid: Vec<f64>,
    pub repetitions: usize,
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rho_grid.is_empty() {
            return Err(Error::InvalidConfig("empty rho grid".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        for &r in &self.rho_grid {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidRho(r));
            }
        }
        if self.rho_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("rho grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Seed for one cell of the sweep.
    pub fn cell_seed(&self, rho_index: usize, repetition: usize) -> u64 {
        derive_seed(self.master_seed, &[rho_index as u64, repetition as u64])
    }
}

/// Grid `lo, lo+step, ...` up to `hi`. `hi` itself is included when
/// `(hi - lo) / step` is an integer within 1e-9. Points are rounded to 12
/// decimals so that e.g. `0.1 * 3` prints as `0.3`.
pub fn rho_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::InvalidConfig(format!("bad grid {lo}:{hi}:{step}")));
    }
    let span = (hi - lo) / step;
    let steps = if (span - span.round()).abs() < 1e-9 {
        span.round() as usize
    } else {
        span.floor() as usize
    };
    Ok((0..=steps)
        .map(|i| {
            if i == steps && (span - span.round()).abs() < 1e-9 {
                hi
            } else {
                ((lo + i as f64 * step) * 1e12).round() / 1e12
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub rep: usize,
    pub accuracy: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoSummary {
    pub rho: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation (n - 1); zero for a single repetition.
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub master_seed: u64,
    pub rows: Vec<SweepRow>,
    pub summary: Vec<RhoSummary>,
}

impl SweepResult {
    pub fn write_rows_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# master_seed={}", self.master_seed)?;
        writeln!(out, "rho,rep,accuracy")?;
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.rho, r.rep, r.accuracy)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# master_seed={}", self.master_seed)?;
        writeln!(out, "rho,mean,min,max,stddev")?;
        for s in &self.summary {
            writeln!(out, "{},{},{},{},{}", s.rho, s.mean, s.min, s.max, s.stddev)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn mean_at(&self, rho: f64) -> Option<f64> {
        self.summary.iter().find(|s| s.rho == rho).map(|s| s.mean)
    }
}

fn summarize(rho: f64, accs: &[f64]) -> RhoSummary {
    let n = accs.len() as f64;
    let mean = accs.iter().sum::<f64>() / n;
    let stddev = if accs.len() > 1 {
        (accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    RhoSummary {
        rho,
        mean,
        min: accs.iter().copied().fold(f64::INFINITY, f64::min),
        max: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        stddev,
    }
}

/// Runs every (rho, repetition) cell, in parallel, each with its own
/// derived seed. Output order is grid order then repetition order.
pub fn rho_sweep(labels: &[Label], config: &SweepConfig, opts: BaselineOptions) -> Result<SweepResult> {
    config.validate()?;
    if labels.is_empty() {
        return Err(Error::EmptyStream);
    }
    let cells: Vec<(usize, usize)> = (0..config.rho_grid.len())
        .flat_map(|i| (0..config.repetitions).map(move |r| (i, r)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(i, rep)| {
            let seed = config.cell_seed(i, rep);
            let rho = config.rho_grid[i];
            let accuracy = random_restart_run(labels, RestartPolicy::new(rho, seed)?, opts)?;
            Ok(SweepRow {
                rho,
                rep,
                accuracy,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = rows
        .chunks(config.repetitions)
        .map(|chunk| {
            let accs: Vec<f64> = chunk.iter().map(|r| r.accuracy).collect();
            summarize(chunk[0].rho, &accs)
        })
        .collect();
    Ok(SweepResult {
        master_seed: config.master_seed,
        rows,
        summary,
    })
}
