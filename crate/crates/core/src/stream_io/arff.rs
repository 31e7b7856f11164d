//! Dense ARFF subset: `@relation`, numeric and nominal `@attribute`s, and a
//! comma-separated `@data` section. Sparse rows, string/date/relational
//! attributes and missing values are rejected.

use std::io::{Read, Write};

use super::{
    Attribute, AttributeKind, ClassColumn, FeatureValue, Instance, Label, Schema, StreamDataset,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ArffOptions {
    pub class: ClassColumn,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn unsupported(line: usize, message: impl Into<String>) -> Error {
    Error::UnsupportedFeature {
        line,
        message: message.into(),
    }
}

/// Splits on commas outside single or double quotes and strips the quotes.
/// Backslash escapes are not part of the subset.
fn split_fields(text: &str, line: usize) -> Result<Vec<String>> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut was_quoted = false;
    let mut closed = false;
    for ch in text.chars() {
        if closed && ch != ',' {
            if ch.is_whitespace() {
                continue;
            }
            return Err(parse_err(line, "text after closing quote"));
        }
        match quote {
            Some(q) if ch == q => {
                quote = None;
                closed = true;
            }
            Some(_) if ch == '\\' => return Err(unsupported(line, "escape sequences")),
            Some(_) => cur.push(ch),
            None => match ch {
                ',' => {
                    fields.push(finish_field(&cur, was_quoted));
                    cur.clear();
                    was_quoted = false;
                    closed = false;
                }
                '\'' | '"' if cur.trim().is_empty() && !was_quoted => {
                    cur.clear();
                    quote = Some(ch);
                    was_quoted = true;
                }
                '\'' | '"' => return Err(parse_err(line, "stray quote character")),
                _ => cur.push(ch),
            },
        }
    }
    if quote.is_some() {
        return Err(parse_err(line, "unterminated quote"));
    }
    fields.push(finish_field(&cur, was_quoted));
    Ok(fields)
}

fn finish_field(raw: &str, quoted: bool) -> String {
    if quoted {
        raw.to_string()
    } else {
        raw.trim().to_string()
    }
}

/// Reads the leading token of a header line, honouring quotes.
fn take_token(text: &str, line: usize) -> Result<(String, &str)> {
    let text = text.trim_start();
    let mut chars = text.char_indices();
    match chars.next() {
        None => Err(parse_err(line, "missing name")),
        Some((_, q @ ('\'' | '"'))) => {
            let end = text[1..]
                .find(q)
                .ok_or_else(|| parse_err(line, "unterminated quote"))?;
            Ok((text[1..1 + end].to_string(), &text[end + 2..]))
        }
        Some(_) => {
            let end = text.find(char::is_whitespace).unwrap_or(text.len());
            Ok((text[..end].to_string(), &text[end..]))
        }
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let (name, ty) = take_token(rest, line)?;
    let ty = ty.trim();
    if ty.is_empty() {
        return Err(parse_err(line, format!("attribute {name:?} has no type")));
    }
    if let Some(body) = ty.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| parse_err(line, "unterminated nominal value list"))?;
        let values = split_fields(body, line)?;
        if values.iter().any(|v| v.is_empty()) {
            return Err(parse_err(line, "empty nominal value"));
        }
        return Attribute::nominal(name, values).map_err(|e| parse_err(line, e.to_string()));
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(Attribute::numeric(name)),
        other if other.starts_with("string")
            || other.starts_with("date")
            || other.starts_with("relational") =>
        {
            Err(unsupported(line, format!("{other} attributes")))
        }
        other => Err(parse_err(line, format!("unknown attribute type {other:?}"))),
    }
}

fn keyword<'a>(line: &'a str, kw: &str) -> Option<&'a str> {
    let head = line.get(..kw.len())?;
    if !head.eq_ignore_ascii_case(kw) {
        return None;
    }
    let rest = &line[kw.len()..];
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest)
    } else {
        None
    }
}

pub fn parse_arff_str(text: &str, options: &ArffOptions) -> Result<StreamDataset> {
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut seen_relation = false;
    let mut in_data = false;

    for (lineno, line) in lines.by_ref() {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = keyword(line, "@relation") {
            if seen_relation {
                return Err(parse_err(lineno, "duplicate @relation"));
            }
            take_token(rest, lineno)?;
            seen_relation = true;
        } else if let Some(rest) = keyword(line, "@attribute") {
            if !seen_relation {
                return Err(parse_err(lineno, "@attribute before @relation"));
            }
            attributes.push(parse_attribute(rest, lineno)?);
        } else if keyword(line, "@data").is_some() {
            in_data = true;
            break;
        } else {
            return Err(parse_err(lineno, format!("unexpected header line {line:?}")));
        }
    }
    if !in_data {
        return Err(parse_err(text.lines().count().max(1), "missing @data section"));
    }
    if attributes.is_empty() {
        return Err(parse_err(1, "no attributes declared"));
    }

    let names: Vec<String> = attributes.iter().map(|a| a.name.clone()).collect();
    let class_index = options.class.resolve(&names)?;
    let schema = Schema::new(attributes, class_index)?;

    let mut instances = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('{') {
            return Err(unsupported(lineno, "sparse data rows"));
        }
        instances.push(parse_row(&schema, line, lineno)?);
    }
    StreamDataset::new(schema, instances)
}

fn parse_row(schema: &Schema, line: &str, lineno: usize) -> Result<Instance> {
    let fields = split_fields(line, lineno)?;
    let attrs = schema.attributes();
    if fields.len() != attrs.len() {
        return Err(parse_err(
            lineno,
            format!("expected {} values, found {}", attrs.len(), fields.len()),
        ));
    }
    let mut features = Vec::with_capacity(attrs.len() - 1);
    let mut label = None;
    for (i, (field, attr)) in fields.iter().zip(attrs).enumerate() {
        if field == "?" {
            return Err(unsupported(lineno, "missing values ('?')"));
        }
        let value = match &attr.kind {
            AttributeKind::Numeric => {
                let x: f64 = field.parse().map_err(|_| {
                    parse_err(lineno, format!("{field:?} is not numeric ({})", attr.name))
                })?;
                if !x.is_finite() {
                    return Err(parse_err(lineno, format!("non-finite value {field:?}")));
                }
                FeatureValue::Numeric(x)
            }
            AttributeKind::Nominal(values) => {
                let idx = values.iter().position(|v| v == field).ok_or_else(|| {
                    parse_err(
                        lineno,
                        format!("{field:?} is not a declared value of {}", attr.name),
                    )
                })?;
                FeatureValue::Nominal(idx)
            }
        };
        if i == schema.class_index() {
            if let FeatureValue::Nominal(idx) = value {
                label = Some(Label(idx));
            }
        } else {
            features.push(value);
        }
    }
    Ok(Instance {
        features,
        label: label.expect("class attribute is nominal"),
    })
}

pub fn parse_arff<R: Read>(mut source: R, options: &ArffOptions) -> Result<StreamDataset> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_arff_str(&text, options)
}

fn quote_if_needed(s: &str) -> String {
    if s.is_empty()
        || s.contains(|c: char| c == ',' || c == '%' || c == '{' || c == '}' || c.is_whitespace())
        || s.starts_with(['\'', '"'])
    {
        format!("'{s}'")
    } else {
        s.to_string()
    }
}

/// Writes `ds` as dense ARFF; re-parsing the output with the same class
/// column yields an equal dataset.
pub fn write_arff<W: Write>(ds: &StreamDataset, relation: &str, mut out: W) -> Result<()> {
    let schema = ds.schema();
    writeln!(out, "@relation {}", quote_if_needed(relation))?;
    writeln!(out)?;
    for attr in schema.attributes() {
        match &attr.kind {
            AttributeKind::Numeric => {
                writeln!(out, "@attribute {} numeric", quote_if_needed(&attr.name))?
            }
            AttributeKind::Nominal(values) => {
                let vals: Vec<String> = values.iter().map(|v| quote_if_needed(v)).collect();
                writeln!(
                    out,
                    "@attribute {} {{{}}}",
                    quote_if_needed(&attr.name),
                    vals.join(",")
                )?
            }
        }
    }
    writeln!(out)?;
    writeln!(out, "@data")?;
    let feature_attrs: Vec<&Attribute> = schema.feature_attributes().collect();
    let mut row = Vec::with_capacity(schema.attributes().len());
    for inst in ds.instances() {
        row.clear();
        let mut feats = inst.features.iter().zip(&feature_attrs);
        for i in 0..schema.attributes().len() {
            if i == schema.class_index() {
                row.push(quote_if_needed(schema.class_name(inst.label)));
                continue;
            }
            let (value, attr) = feats.next().expect("arity checked at construction");
            row.push(match (value, &attr.kind) {
                (FeatureValue::Numeric(x), _) => format!("{x:?}"),
                (FeatureValue::Nominal(j), AttributeKind::Nominal(vals)) => {
                    quote_if_needed(&vals[*j])
                }
                (FeatureValue::Nominal(_), AttributeKind::Numeric) => {
                    unreachable!("schema conformance checked at construction")
                }
            });
        }
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}
