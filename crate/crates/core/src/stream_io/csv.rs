//! Dense CSV reader. The class column is always nominal; other columns are
//! numeric when every value parses as a finite number, otherwise nominal
//! with values ordered by first occurrence.

use std::io::Read;

use csv::{ReaderBuilder, Trim};

use super::{Attribute, ClassColumn, FeatureValue, Instance, Label, Schema, StreamDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    pub class_column: ClassColumn,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            class_column: ClassColumn::Last,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

enum Column {
    Numeric(Vec<f64>),
    Nominal { values: Vec<String>, codes: Vec<usize> },
}

fn nominal_column(cells: &[String]) -> (Vec<String>, Vec<usize>) {
    let mut values: Vec<String> = Vec::new();
    let codes = cells
        .iter()
        .map(|c| match values.iter().position(|v| v == c) {
            Some(i) => i,
            None => {
                values.push(c.clone());
                values.len() - 1
            }
        })
        .collect();
    (values, codes)
}

fn infer_column(cells: &[String]) -> Column {
    let parsed: Option<Vec<f64>> = cells
        .iter()
        .map(|c| c.parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect();
    match parsed {
        Some(xs) => Column::Numeric(xs),
        None => {
            let (values, codes) = nominal_column(cells);
            Column::Nominal { values, codes }
        }
    }
}

pub fn parse_csv_str(text: &str, options: &CsvOptions) -> Result<StreamDataset> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .comment(Some(b'#'))
        .double_quote(false)
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut row_lines: Vec<usize> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if fields.iter().any(|f| f.contains('"')) {
            return Err(Error::UnsupportedFeature {
                line,
                message: "escaped or embedded quotes".into(),
            });
        }
        if options.has_header && header.is_none() {
            header = Some(fields);
            continue;
        }
        let width = header.as_ref().or(rows.first()).map(Vec::len);
        if let Some(w) = width {
            if fields.len() != w {
                return Err(parse_err(
                    line,
                    format!("row {line} has {} fields, expected {w}", fields.len()),
                ));
            }
        }
        if fields.iter().any(String::is_empty) {
            return Err(Error::UnsupportedFeature {
                line,
                message: "empty cell".into(),
            });
        }
        rows.push(fields);
        row_lines.push(line);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "empty input: no data rows"));
    }

    let width = rows[0].len();
    let names = header.unwrap_or_else(|| (1..=width).map(|i| format!("col{i}")).collect());
    let class_index = options.class_column.resolve(&names)?;

    let mut attributes = Vec::with_capacity(width);
    let mut columns = Vec::with_capacity(width);
    for (j, name) in names.iter().enumerate() {
        let cells: Vec<String> = rows.iter().map(|r| r[j].clone()).collect();
        let column = if j == class_index {
            let (values, codes) = nominal_column(&cells);
            Column::Nominal { values, codes }
        } else {
            infer_column(&cells)
        };
        attributes.push(match &column {
            Column::Numeric(_) => Attribute::numeric(name.clone()),
            Column::Nominal { values, .. } => Attribute::nominal(name.clone(), values.clone())?,
        });
        columns.push(column);
    }

    let instances = (0..rows.len())
        .map(|t| {
            let mut features = Vec::with_capacity(width - 1);
            let mut label = Label(0);
            for (j, column) in columns.iter().enumerate() {
                let value = match column {
                    Column::Numeric(xs) => FeatureValue::Numeric(xs[t]),
                    Column::Nominal { codes, .. } => FeatureValue::Nominal(codes[t]),
                };
                match (j == class_index, value) {
                    (true, FeatureValue::Nominal(c)) => label = Label(c),
                    (true, FeatureValue::Numeric(_)) => unreachable!("class column is nominal"),
                    (false, v) => features.push(v),
                }
            }
            Instance { features, label }
        })
        .collect();

    StreamDataset::new(Schema::new(attributes, class_index)?, instances)
}

pub fn parse_csv<R: Read>(mut source: R, options: &CsvOptions) -> Result<StreamDataset> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_csv_str(&text, options)
}
