//! CSV ingestion and export.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use mfpb_core::{Dataset, Label, ProtectedAttribute};

use crate::error::{CliError, CoreContext, Result};
use crate::schema::{DatasetSchema, FeatureKind, FeatureSpec, MissingPolicy, ProtectedSpec};

/// Result of [`load_csv`].
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset,
    /// Raw label value mapped to -1: the first non-positive value seen.
    pub negative_label: String,
    /// 0-based data-record index (header excluded) of every kept row.
    pub kept_records: Vec<usize>,
    /// File line numbers of rows skipped under `drop_row`.
    pub dropped_lines: Vec<u64>,
}

/// Empty fields and `?` count as missing.
pub fn is_missing(value: &str) -> bool {
    value.is_empty() || value == "?"
}

enum Cell {
    Num(f64),
    Cat(String),
}

struct Row {
    label: Result<Label, String>,
    masks: Vec<bool>,
    cells: Vec<Cell>,
}

pub fn load_csv(path: &Path, schema: &DatasetSchema) -> Result<LoadedData> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_csv(file, path, schema)
}

/// Reads CSV from `reader`; `path` only labels error messages.
///
/// Fields are trimmed. Categorical features are one-hot encoded into
/// `column=value` indicators, values in lexicographic order.
pub fn read_csv<R: Read>(reader: R, path: &Path, schema: &DatasetSchema) -> Result<LoadedData> {
    let schema_err = |message: String| CliError::Schema { path: path.to_path_buf(), message };
    schema.validate().map_err(schema_err)?;

    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        index.entry(h).or_insert(i);
    }
    let column = |name: &str| {
        index.get(name).copied().ok_or_else(|| CliError::Schema {
            path: path.to_path_buf(),
            message: format!("column '{name}' not found in the CSV header"),
        })
    };
    let label_col = column(&schema.label_column)?;
    let protected_cols = schema.protected.iter().map(|p| column(&p.column)).collect::<Result<Vec<_>>>()?;
    let feature_cols = schema.features.iter().map(|f| column(&f.column)).collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut kept_records = Vec::new();
    let mut dropped_lines = Vec::new();
    let mut negative: Option<String> = None;

    for (record_index, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parsed = parse_row(&record, schema, label_col, &protected_cols, &feature_cols).and_then(|mut row| {
            if let Err(other) = &row.label {
                match &negative {
                    None => {
                        negative = Some(other.clone());
                        row.label = Ok(Label::Negative);
                    }
                    Some(neg) if neg == other => row.label = Ok(Label::Negative),
                    Some(neg) => {
                        return Err(format!(
                            "label '{other}' is neither the positive label '{}' nor the negative label '{neg}'",
                            schema.positive_label
                        ))
                    }
                }
            }
            Ok(row)
        });
        match parsed {
            Ok(row) => {
                rows.push(row);
                kept_records.push(record_index);
            }
            Err(message) => match schema.missing_policy {
                MissingPolicy::Error => return Err(CliError::Row { path: path.to_path_buf(), line, message }),
                MissingPolicy::DropRow => dropped_lines.push(line),
            },
        }
    }

    let Some(negative_label) = negative else {
        return Err(CliError::Core {
            context: "data",
            source: mfpb_core::Error::DegenerateData(format!(
                "{}: every kept row has the positive label '{}'",
                path.display(),
                schema.positive_label
            )),
        });
    };

    let (names, matrix) = encode(&schema.features, &rows);
    let labels = rows.iter().map(|r| *r.label.as_ref().expect("resolved above")).collect();
    let attributes = schema
        .protected
        .iter()
        .enumerate()
        .map(|(j, p)| ProtectedAttribute { name: p.column.clone(), mask: rows.iter().map(|r| r.masks[j]).collect() })
        .collect();
    let dataset = Dataset::new(names, matrix, labels, attributes).ctx("data")?;
    Ok(LoadedData { dataset, negative_label, kept_records, dropped_lines })
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.position() {
        Some(p) => CliError::Row { path: path.to_path_buf(), line: p.line(), message: e.to_string() },
        None => CliError::Csv { path: path.to_path_buf(), source: e },
    }
}

/// Parses one record; a label that is not the positive one comes back as
/// `Err(raw)` for the caller to resolve.
fn parse_row(
    record: &csv::StringRecord,
    schema: &DatasetSchema,
    label_col: usize,
    protected_cols: &[usize],
    feature_cols: &[usize],
) -> std::result::Result<Row, String> {
    let field = |i: usize, name: &str| {
        let v = &record[i];
        if is_missing(v) {
            Err(format!("missing value in column '{name}'"))
        } else {
            Ok(v)
        }
    };
    let raw_label = field(label_col, &schema.label_column)?;
    let label = if raw_label == schema.positive_label { Ok(Label::Positive) } else { Err(raw_label.to_string()) };

    let masks = schema
        .protected
        .iter()
        .zip(protected_cols)
        .map(|(p, &i)| field(i, &p.column).map(|v| p.protected_values.iter().any(|pv| pv == v)))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut cells = Vec::with_capacity(feature_cols.len());
    for (f, &i) in schema.features.iter().zip(feature_cols) {
        let v = field(i, &f.column)?;
        cells.push(match f.kind {
            FeatureKind::Numeric => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Cell::Num(x),
                _ => return Err(format!("'{v}' in column '{}' is not a finite number", f.column)),
            },
            FeatureKind::Categorical => Cell::Cat(v.to_string()),
        });
    }
    Ok(Row { label, masks, cells })
}

/// Feature names and rows after one-hot encoding.
fn encode(features: &[FeatureSpec], rows: &[Row]) -> (Vec<String>, Vec<Vec<f64>>) {
    let levels: Vec<Vec<String>> = features
        .iter()
        .enumerate()
        .map(|(f, spec)| match spec.kind {
            FeatureKind::Numeric => Vec::new(),
            FeatureKind::Categorical => rows
                .iter()
                .filter_map(|r| match &r.cells[f] {
                    Cell::Cat(s) => Some(s.clone()),
                    Cell::Num(_) => None,
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        })
        .collect();

    let mut names = Vec::new();
    for (spec, lv) in features.iter().zip(&levels) {
        match spec.kind {
            FeatureKind::Numeric => names.push(spec.column.clone()),
            FeatureKind::Categorical => names.extend(lv.iter().map(|v| format!("{}={v}", spec.column))),
        }
    }

    let matrix = rows
        .iter()
        .map(|r| {
            let mut out = Vec::with_capacity(names.len());
            for (cell, lv) in r.cells.iter().zip(&levels) {
                match cell {
                    Cell::Num(x) => out.push(*x),
                    Cell::Cat(s) => out.extend(lv.iter().map(|v| if v == s { 1.0 } else { 0.0 })),
                }
            }
            out
        })
        .collect();
    (names, matrix)
}

/// Writes `dataset` as CSV (features, one `0`/`1` column per protected
/// attribute, label `1`/`0`) and returns a schema that reads it back.
pub fn write_csv<W: Write>(dataset: &Dataset, out: W) -> std::result::Result<DatasetSchema, csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let attr_cols: Vec<String> = dataset.attributes().iter().map(|a| format!("{}_group", a.name)).collect();
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.extend(attr_cols.iter().map(String::as_str));
    header.push("label");
    w.write_record(&header)?;
    for i in 0..dataset.len() {
        let mut rec: Vec<String> = dataset.row(i).iter().map(|v| format!("{v:?}")).collect();
        rec.extend(dataset.attributes().iter().map(|a| if a.mask[i] { "1" } else { "0" }.to_string()));
        rec.push(if dataset.labels()[i].is_positive() { "1" } else { "0" }.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(DatasetSchema {
        label_column: "label".into(),
        positive_label: "1".into(),
        protected: attr_cols
            .into_iter()
            .map(|column| ProtectedSpec { column, protected_values: vec!["1".into()] })
            .collect(),
        features: dataset
            .feature_names()
            .iter()
            .map(|c| FeatureSpec { column: c.clone(), kind: FeatureKind::Numeric })
            .collect(),
        missing_policy: MissingPolicy::Error,
    })
}
