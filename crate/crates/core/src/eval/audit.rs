//! Grades an accuracy figure against the naive bars of the same stream.

use serde::Serialize;

use super::{Confusion, EvalReport};
use crate::baselines::{majority_baseline, BaselineOptions};
use crate::diagnostics::{independence_bar, label_distribution, persistence_accuracy};
use crate::error::{Error, Result};
use crate::stream_io::{Label, StreamDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AbovePersistence,
    BelowPersistence,
    BelowMajority,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditBars {
    pub majority: f64,
    pub independence: f64,
    pub persistence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub baseline: BaselineOptions,
    /// A subject counts as below the majority bar only when it falls short
    /// by more than this. The default is half of 0.1 percentage points, the
    /// precision accuracies are usually reported at.
    pub majority_tolerance: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            baseline: BaselineOptions::default(),
            majority_tolerance: 0.0005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditVerdict {
    pub n: usize,
    pub accuracy: f64,
    pub bars: AuditBars,
    /// `accuracy - bars.persistence`.
    pub margin: f64,
    pub verdict: Verdict,
}

/// Majority, independence and persistence bars for a label stream.
pub fn audit_labels(labels: &[Label], n_classes: usize, opts: &AuditOptions) -> Result<AuditBars> {
    let dist = label_distribution(labels, n_classes)?;
    Ok(AuditBars {
        majority: majority_baseline(labels, opts.baseline)?,
        independence: independence_bar(&dist),
        persistence: persistence_accuracy(labels, opts.baseline.cold_start)?,
    })
}

fn grade(n: usize, accuracy: f64, bars: AuditBars, opts: &AuditOptions) -> AuditVerdict {
    // Strict: matching the persistence bar is not evidence of adaptation.
    let verdict = if accuracy > bars.persistence {
        Verdict::AbovePersistence
    } else if accuracy < bars.majority - opts.majority_tolerance {
        Verdict::BelowMajority
    } else {
        Verdict::BelowPersistence
    };
    AuditVerdict {
        n,
        accuracy,
        bars,
        margin: accuracy - bars.persistence,
        verdict,
    }
}

pub fn audit_accuracy(subject: f64, ds: &StreamDataset, opts: &AuditOptions) -> Result<AuditVerdict> {
    if !(0.0..=1.0).contains(&subject) {
        return Err(Error::InvalidConfig(format!("accuracy {subject} is outside [0, 1]")));
    }
    let labels = ds.labels();
    let bars = audit_labels(&labels, ds.n_classes(), opts)?;
    Ok(grade(labels.len(), subject, bars, opts))
}

/// `(true, predicted)` label names, verbatim.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionLog {
    pub entries: Vec<(String, String)>,
}

impl PredictionLog {
    /// Reads the `true,predicted` CSV format.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if headers.len() != 2 || &headers[0] != "true" || &headers[1] != "predicted" {
            return Err(Error::Parse {
                line: 1,
                message: "prediction log header must be \"true,predicted\"".into(),
            });
        }
        let mut entries = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                message: e.to_string(),
            })?;
            entries.push((rec[0].to_string(), rec[1].to_string()));
        }
        Ok(PredictionLog { entries })
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "true,predicted")?;
        for (t, p) in &self.entries {
            writeln!(out, "{t},{p}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Audit of an externally produced prediction log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogAudit {
    pub n: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
    pub bars: AuditBars,
    pub margin: f64,
    pub verdict: Verdict,
}

impl LogAudit {
    pub fn verdict(&self) -> AuditVerdict {
        AuditVerdict {
            n: self.n,
            accuracy: self.accuracy,
            bars: self.bars,
            margin: self.margin,
            verdict: self.verdict,
        }
    }
}

/// Scores the log and grades it against bars computed from its true-label
/// column. When `reference` is given the true labels must match its labels
/// exactly, and its class order is used.
pub fn audit_prediction_log(
    log: &PredictionLog,
    reference: Option<&StreamDataset>,
    opts: &AuditOptions,
) -> Result<(LogAudit, EvalReport)> {
    if log.entries.is_empty() {
        return Err(Error::EmptyLog);
    }
    let mut classes: Vec<String> = match reference {
        Some(ds) => ds.schema().class_values().to_vec(),
        None => Vec::new(),
    };
    let index_of = |name: &str, classes: &mut Vec<String>| -> Label {
        match classes.iter().position(|c| c == name) {
            Some(i) => Label(i),
            None => {
                classes.push(name.to_string());
                Label(classes.len() - 1)
            }
        }
    };

    let truth: Vec<Label> = match reference {
        Some(ds) => {
            let expected = ds.labels();
            for (i, (t, _)) in log.entries.iter().enumerate() {
                match expected.get(i) {
                    Some(&l) if ds.schema().class_name(l) == t => {}
                    _ => return Err(Error::LabelMismatch(i)),
                }
            }
            if expected.len() != log.entries.len() {
                return Err(Error::LabelMismatch(log.entries.len()));
            }
            expected
        }
        None => log
            .entries
            .iter()
            .map(|(t, _)| index_of(t, &mut classes))
            .collect(),
    };
    let n_true_classes = classes.len();
    let predicted: Vec<Label> = log
        .entries
        .iter()
        .map(|(_, p)| index_of(p, &mut classes))
        .collect();

    let confusion = Confusion::from_pairs(classes, truth.iter().copied().zip(predicted));
    let correct = confusion.diagonal();
    let n = truth.len();
    let accuracy = correct as f64 / n as f64;
    let bars = audit_labels(&truth, n_true_classes, opts)?;
    let graded = grade(n, accuracy, bars, opts);
    let report = EvalReport {
        classifier: "prediction-log".into(),
        n,
        correct,
        accuracy,
        confusion: confusion.clone(),
        wall_time: Default::default(),
    };
    Ok((
        LogAudit {
            n,
            accuracy,
            confusion,
            bars,
            margin: graded.margin,
            verdict: graded.verdict,
        },
        report,
    ))
}
