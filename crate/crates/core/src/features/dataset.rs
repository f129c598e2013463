use std::io::{Read, Write};

use thiserror::Error;

use super::{registry, ClassLabel, Example, FeatureValue, FeatureVector, FEATURE_COUNT};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header: {0}")]
    Header(String),
    #[error("row {row}, column {column}: {message}")]
    Value { row: usize, column: String, message: String },
}

/// One row read back from a dataset file; the class column is optional.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetRow {
    pub features: FeatureVector,
    pub label: Option<ClassLabel>,
}

/// Writes examples as CSV: one column per registry feature, then `class`.
pub fn write_dataset<W: Write>(examples: &[Example], out: W) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = registry().iter().map(|d| d.name).collect();
    header.push("class");
    w.write_record(&header)?;
    for ex in examples {
        let mut row: Vec<String> = ex.features.values.iter().map(ToString::to_string).collect();
        row.push(ex.label.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a dataset written by [`write_dataset`]. Columns must follow the
/// registry order; a trailing `class` column is optional.
pub fn read_dataset<R: Read>(input: R) -> Result<Vec<DatasetRow>, DatasetError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let has_class = match header.len() {
        n if n == FEATURE_COUNT => false,
        n if n == FEATURE_COUNT + 1 && &header[FEATURE_COUNT] == "class" => true,
        n => return Err(DatasetError::Header(format!("expected {FEATURE_COUNT} feature columns (+ class), got {n}"))),
    };
    for (i, def) in registry().iter().enumerate() {
        if &header[i] != def.name {
            return Err(DatasetError::Header(format!("column {} is `{}`, expected `{}`", i + 1, &header[i], def.name)));
        }
    }

    let mut rows = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = n + 1;
        let values = registry()
            .iter()
            .enumerate()
            .map(|(i, def)| {
                FeatureValue::parse(def.ftype, &rec[i]).map_err(|message| DatasetError::Value {
                    row,
                    column: def.name.to_string(),
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let label = if has_class {
            Some(rec[FEATURE_COUNT].parse().map_err(|message| DatasetError::Value {
                row,
                column: "class".into(),
                message,
            })?)
        } else {
            None
        };
        rows.push(DatasetRow { features: FeatureVector { values }, label });
    }
    Ok(rows)
}
