use super::Classifier;
use crate::stream_io::{AttributeKind, FeatureValue, Label, Schema};

/// Lower bound on Gaussian variances, in squared feature units.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Welford running mean and variance.
#[derive(Debug, Clone, Copy, Default)]
struct Gaussian {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Gaussian {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        let v = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        v.max(VARIANCE_FLOOR)
    }

    fn log_density(&self, x: f64) -> f64 {
        let v = self.variance();
        let d = x - self.mean;
        -0.5 * (2.0 * std::f64::consts::PI * v).ln() - d * d / (2.0 * v)
    }
}

#[derive(Debug, Clone)]
enum FeatureModel {
    Numeric(Vec<Gaussian>),
    /// `counts[class][value]`.
    Nominal(Vec<Vec<f64>>),
}

/// Streaming naive Bayes: per-class Gaussians for numeric features, add-one
/// smoothed frequency tables for nominal ones, add-one smoothed priors.
///
/// Only classes observed at least once compete in the argmax (until any
/// class has been observed every class does); ties go to the earlier class
/// in schema order.
#[derive(Debug, Clone)]
pub struct NaiveBayes {
    schema: Schema,
    class_counts: Vec<f64>,
    features: Vec<FeatureModel>,
    seen: f64,
}

impl NaiveBayes {
    pub fn new(schema: &Schema) -> Self {
        let k = schema.n_classes();
        let features = schema
            .feature_attributes()
            .map(|a| match &a.kind {
                AttributeKind::Numeric => FeatureModel::Numeric(vec![Gaussian::default(); k]),
                AttributeKind::Nominal(values) => {
                    FeatureModel::Nominal(vec![vec![0.0; values.len()]; k])
                }
            })
            .collect();
        NaiveBayes {
            schema: schema.clone(),
            class_counts: vec![0.0; k],
            features,
            seen: 0.0,
        }
    }

    /// Unnormalised log posterior per class.
    pub fn log_posteriors(&self, features: &[FeatureValue]) -> Vec<f64> {
        let k = self.class_counts.len() as f64;
        (0..self.class_counts.len())
            .map(|c| {
                let mut lp = ((self.class_counts[c] + 1.0) / (self.seen + k)).ln();
                if self.class_counts[c] == 0.0 {
                    return lp;
                }
                for (model, value) in self.features.iter().zip(features) {
                    lp += match (model, value) {
                        (FeatureModel::Numeric(g), FeatureValue::Numeric(x)) => g[c].log_density(*x),
                        (FeatureModel::Nominal(t), FeatureValue::Nominal(v)) => {
                            let row = &t[c];
                            let hits = row.get(*v).copied().unwrap_or(0.0);
                            ((hits + 1.0) / (self.class_counts[c] + row.len() as f64)).ln()
                        }
                        _ => 0.0,
                    };
                }
                lp
            })
            .collect()
    }

    /// Argmax over eligible classes of the given scores.
    pub fn decide(&self, scores: &[f64]) -> Label {
        let any_seen = self.seen > 0.0;
        let mut best: Option<usize> = None;
        for (c, &s) in scores.iter().enumerate() {
            if any_seen && self.class_counts[c] == 0.0 {
                continue;
            }
            match best {
                Some(b) if scores[b] >= s => {}
                _ => best = Some(c),
            }
        }
        Label(best.unwrap_or(0))
    }
}

impl Classifier for NaiveBayes {
    fn name(&self) -> String {
        "naive-bayes".into()
    }

    fn predict(&self, features: &[FeatureValue]) -> Label {
        self.decide(&self.log_posteriors(features))
    }

    fn update(&mut self, features: &[FeatureValue], label: Label) {
        let c = label.0;
        self.class_counts[c] += 1.0;
        self.seen += 1.0;
        for (model, value) in self.features.iter_mut().zip(features) {
            match (model, value) {
                (FeatureModel::Numeric(g), FeatureValue::Numeric(x)) => g[c].push(*x),
                (FeatureModel::Nominal(t), FeatureValue::Nominal(v)) => {
                    if let Some(slot) = t[c].get_mut(*v) {
                        *slot += 1.0;
                    }
                }
                _ => {}
            }
        }
    }

    fn reset(&mut self) {
        *self = NaiveBayes::new(&self.schema);
    }

    fn schema(&self) -> Option<&Schema> {
        Some(&self.schema)
    }
}
