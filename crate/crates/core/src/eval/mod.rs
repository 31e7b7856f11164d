//! Prequential (test-then-train) evaluation.
//!
//! Every instance is first predicted and then used for training, in stream
//! order, and accuracy is taken over all `n` predictions with no warm-up
//! exclusion or fading.

mod audit;
mod naive_bayes;

use std::time::{Duration, Instant};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::baselines::{IncrementalMajority, RestartMajority, RestartPolicy, TieBreak};
use crate::error::{Error, Result};
use crate::stream_io::{FeatureValue, Label, Schema, StreamDataset};

pub use self::audit::{
    audit_accuracy, audit_labels, audit_prediction_log, AuditBars, AuditOptions, AuditVerdict,
    LogAudit, PredictionLog, Verdict,
};
pub use self::naive_bayes::{NaiveBayes, VARIANCE_FLOOR};

/// An incrementally trained classifier. `predict` must not change state.
pub trait Classifier {
    fn name(&self) -> String;

    fn predict(&self, features: &[FeatureValue]) -> Label;

    fn update(&mut self, features: &[FeatureValue], label: Label);

    /// Returns to the freshly constructed state.
    fn reset(&mut self);

    /// The schema this classifier was built for, if it depends on one.
    fn schema(&self) -> Option<&Schema> {
        None
    }
}

/// Predicts the most frequent label seen so far.
#[derive(Debug, Clone)]
pub struct MajorityClassifier(IncrementalMajority);

impl MajorityClassifier {
    pub fn new(n_classes: usize, cold: Label, tie: TieBreak) -> Self {
        MajorityClassifier(IncrementalMajority::new(n_classes, cold, tie))
    }
}

impl Classifier for MajorityClassifier {
    fn name(&self) -> String {
        "majority".into()
    }

    fn predict(&self, _: &[FeatureValue]) -> Label {
        self.0.predict()
    }

    fn update(&mut self, _: &[FeatureValue], label: Label) {
        self.0.observe(label);
    }

    fn reset(&mut self) {
        self.0.reset();
    }
}

/// Predicts the previous label.
#[derive(Debug, Clone)]
pub struct PersistenceClassifier {
    cold: Label,
    last: Option<Label>,
}

impl PersistenceClassifier {
    pub fn new(cold: Label) -> Self {
        PersistenceClassifier { cold, last: None }
    }
}

impl Classifier for PersistenceClassifier {
    fn name(&self) -> String {
        "persistence".into()
    }

    fn predict(&self, _: &[FeatureValue]) -> Label {
        self.last.unwrap_or(self.cold)
    }

    fn update(&mut self, _: &[FeatureValue], label: Label) {
        self.last = Some(label);
    }

    fn reset(&mut self) {
        self.last = None;
    }
}

/// Majority with random restarts, as a pluggable classifier.
#[derive(Debug, Clone)]
pub struct RestartClassifier(RestartMajority, RestartPolicy);

impl RestartClassifier {
    pub fn new(n_classes: usize, cold: Label, tie: TieBreak, policy: RestartPolicy) -> Self {
        RestartClassifier(RestartMajority::new(n_classes, cold, tie, policy), policy)
    }
}

impl Classifier for RestartClassifier {
    fn name(&self) -> String {
        format!("restart:{}", self.1.rho())
    }

    fn predict(&self, _: &[FeatureValue]) -> Label {
        self.0.predict()
    }

    fn update(&mut self, _: &[FeatureValue], label: Label) {
        self.0.observe(label);
    }

    fn reset(&mut self) {
        self.0.reset();
    }
}

/// Square confusion matrix; rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct Confusion {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl Confusion {
    pub fn from_pairs(labels: Vec<String>, pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut counts = vec![vec![0; labels.len()]; labels.len()];
        for (t, p) in pairs {
            counts[t.0][p.0] += 1;
        }
        Confusion { labels, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }
}

impl Serialize for Confusion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Confusion", 2)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("counts", &self.counts)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub classifier: String,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
    /// Not serialised, so repeated runs produce identical output.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Runs a prequential pass and also returns the prediction trace.
pub fn prequential_trace(
    classifier: &mut dyn Classifier,
    ds: &StreamDataset,
) -> Result<(EvalReport, Vec<Label>)> {
    if ds.is_empty() {
        return Err(Error::EmptyStream);
    }
    if let Some(bound) = classifier.schema() {
        if bound != ds.schema() {
            return Err(Error::SchemaMismatch);
        }
    }
    let start = Instant::now();
    let mut predictions = Vec::with_capacity(ds.len());
    for inst in ds.instances() {
        predictions.push(classifier.predict(&inst.features));
        classifier.update(&inst.features, inst.label);
    }
    let wall_time = start.elapsed();

    let mut names = ds.schema().class_values().to_vec();
    let widest = predictions.iter().map(|p| p.0 + 1).max().unwrap_or(0);
    while names.len() < widest {
        names.push(format!("<class {}>", names.len()));
    }
    let confusion = Confusion::from_pairs(
        names,
        ds.instances().iter().map(|i| i.label).zip(predictions.iter().copied()),
    );
    let correct = confusion.diagonal();
    let report = EvalReport {
        classifier: classifier.name(),
        n: ds.len(),
        correct,
        accuracy: correct as f64 / ds.len() as f64,
        confusion,
        wall_time,
    };
    Ok((report, predictions))
}

pub fn prequential_eval(classifier: &mut dyn Classifier, ds: &StreamDataset) -> Result<EvalReport> {
    prequential_trace(classifier, ds).map(|(r, _)| r)
}
