//! Canonical in-memory stream representation and the ARFF / CSV readers
//! that produce it.
//!
//! Instance order is the time index: instance `i` in the source file is
//! instance `i` in [`StreamDataset::instances`].

mod arff;
mod csv;

use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};

pub use self::arff::{parse_arff, parse_arff_str, write_arff, ArffOptions};
pub use self::csv::{parse_csv, parse_csv_str, CsvOptions};

/// A class value, stored as an index into the class attribute's value list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Label(pub usize);

impl Label {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    /// Builds a nominal attribute, rejecting empty or duplicated value lists.
    pub fn nominal(name: impl Into<String>, values: Vec<String>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "nominal attribute {name:?} has no values"
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::InvalidConfig(format!(
                    "nominal attribute {name:?} repeats value {v:?}"
                )));
            }
        }
        Ok(Attribute {
            name,
            kind: AttributeKind::Nominal(values),
        })
    }

    pub fn nominal_values(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Nominal(v) => Some(v),
            AttributeKind::Numeric => None,
        }
    }
}

/// Attribute list plus the position of the class attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    class_index: usize,
}

impl Schema {
    /// The class attribute must exist and be nominal.
    pub fn new(attributes: Vec<Attribute>, class_index: usize) -> Result<Self> {
        let class = attributes.get(class_index).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "class index {class_index} out of range for {} attributes",
                attributes.len()
            ))
        })?;
        if class.nominal_values().is_none() {
            return Err(Error::InvalidConfig(format!(
                "class attribute {:?} must be nominal",
                class.name
            )));
        }
        Ok(Schema {
            attributes,
            class_index,
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn class_values(&self) -> &[String] {
        self.class_attribute()
            .nominal_values()
            .expect("class attribute is nominal")
    }

    pub fn n_classes(&self) -> usize {
        self.class_values().len()
    }

    /// Non-class attributes, in the order features are stored on instances.
    pub fn feature_attributes(&self) -> impl Iterator<Item = &Attribute> {
        self.attributes
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.class_index)
            .map(|(_, a)| a)
    }

    pub fn n_features(&self) -> usize {
        self.attributes.len() - 1
    }

    pub fn label_of(&self, value: &str) -> Option<Label> {
        self.class_values().iter().position(|v| v == value).map(Label)
    }

    pub fn class_name(&self, label: Label) -> &str {
        &self.class_values()[label.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureValue {
    Numeric(f64),
    /// Index into the attribute's nominal value list.
    Nominal(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<FeatureValue>,
    pub label: Label,
}

/// An ordered, schema-conforming stream of labelled instances.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamDataset {
    schema: Schema,
    instances: Vec<Instance>,
}

impl StreamDataset {
    /// Checks every instance against the schema before accepting it.
    pub fn new(schema: Schema, instances: Vec<Instance>) -> Result<Self> {
        let features: Vec<&Attribute> = schema.feature_attributes().collect();
        for (t, inst) in instances.iter().enumerate() {
            if inst.features.len() != features.len() {
                return Err(Error::InvalidConfig(format!(
                    "instance {t} has {} features, schema has {}",
                    inst.features.len(),
                    features.len()
                )));
            }
            if inst.label.0 >= schema.n_classes() {
                return Err(Error::InvalidConfig(format!(
                    "instance {t} has out-of-range label {}",
                    inst.label.0
                )));
            }
            for (value, attr) in inst.features.iter().zip(&features) {
                let ok = match (value, &attr.kind) {
                    (FeatureValue::Numeric(x), AttributeKind::Numeric) => x.is_finite(),
                    (FeatureValue::Nominal(i), AttributeKind::Nominal(vals)) => *i < vals.len(),
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidConfig(format!(
                        "instance {t} does not conform to attribute {:?}",
                        attr.name
                    )));
                }
            }
        }
        Ok(StreamDataset { schema, instances })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.schema.n_classes()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub n_instances: usize,
    pub n_features: usize,
    pub class_values: Vec<String>,
    pub class_counts: Vec<usize>,
}

pub fn dataset_summary(ds: &StreamDataset) -> DatasetSummary {
    let mut class_counts = vec![0; ds.n_classes()];
    for inst in ds.instances() {
        class_counts[inst.label.0] += 1;
    }
    DatasetSummary {
        n_instances: ds.len(),
        n_features: ds.schema().n_features(),
        class_values: ds.schema().class_values().to_vec(),
        class_counts,
    }
}

/// Which column holds the class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ClassColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl ClassColumn {
    pub(crate) fn resolve(&self, names: &[String]) -> Result<usize> {
        match self {
            ClassColumn::Last => names
                .len()
                .checked_sub(1)
                .ok_or_else(|| Error::InvalidConfig("no attributes".into())),
            ClassColumn::Index(i) if *i < names.len() => Ok(*i),
            ClassColumn::Index(i) => Err(Error::InvalidConfig(format!(
                "class column {i} out of range for {} columns",
                names.len()
            ))),
            ClassColumn::Name(n) => names
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::InvalidConfig(format!("no column named {n:?}"))),
        }
    }
}

/// Parses ARFF or CSV, choosing by content: a first significant line that
/// starts with `@` (after `%` comments) means ARFF.
pub fn parse_auto_str(text: &str, class: ClassColumn) -> Result<StreamDataset> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with('@') => parse_arff_str(text, &ArffOptions { class }),
        _ => parse_csv_str(
            text,
            &CsvOptions {
                has_header: true,
                class_column: class,
            },
        ),
    }
}

pub fn parse_auto<R: Read>(mut source: R, class: ClassColumn) -> Result<StreamDataset> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_auto_str(&text, class)
}
