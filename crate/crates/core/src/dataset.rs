//! CSV file formats shared by the library, the generators and the CLI.
//!
//! Dataset files carry a header `f0,...,f{d-1}[,label]`; an empty label cell
//! marks an unlabeled row, so one format serves labeled, unlabeled and mixed
//! files. Ground-truth sidecars carry `index,label[,rare]`. Prediction files
//! carry one posterior column per class. All numbers use the shortest
//! round-trip decimal form.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::Error;
use crate::ssl::Prediction;
use crate::{FeatureMatrix, Label, Result};

/// A parsed dataset file: features plus an optional label per row.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: FeatureMatrix,
    pub labels: Vec<Option<Label>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// True when every row carries a label.
    pub fn fully_labeled(&self) -> bool {
        self.labels.iter().all(|l| l.is_some())
    }

    /// Index of the first unlabeled row, 1-based counting the header, for
    /// error messages.
    pub fn first_unlabeled_row(&self) -> Option<usize> {
        self.labels.iter().position(|l| l.is_none()).map(|i| i + 2)
    }
}

fn parse_err(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        row,
        message: message.into(),
    }
}

/// Reads a dataset CSV. The header must name the feature columns f0..f{d-1}
/// in order, optionally followed by `label`.
pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| parse_err(path, 0, e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let mut dim = headers.len();
    let mut has_label = false;
    if headers.len() >= 2 && &headers[headers.len() - 1] == "label" {
        has_label = true;
        dim = headers.len() - 1;
    }
    if dim == 0 {
        return Err(parse_err(path, 1, "no feature columns"));
    }
    for (j, name) in headers.iter().take(dim).enumerate() {
        let expected = format!("f{j}");
        if name != expected {
            return Err(parse_err(
                path,
                1,
                format!("expected column {expected:?}, found {name:?}"),
            ));
        }
    }
    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<Option<Label>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // header is row 1
        let record = record.map_err(|e| parse_err(path, row, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(parse_err(
                path,
                row,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for j in 0..dim {
            let cell = &record[j];
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(path, row, format!("invalid number {cell:?} in f{j}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, row, format!("non-finite value in f{j}")));
            }
            values.push(v);
        }
        if has_label {
            let cell = record[dim].trim();
            if cell.is_empty() {
                labels.push(None);
            } else {
                let l: Label = cell
                    .parse()
                    .map_err(|_| parse_err(path, row, format!("invalid label {cell:?}")))?;
                labels.push(Some(l));
            }
        } else {
            labels.push(None);
        }
    }
    let n = labels.len();
    Ok(Dataset {
        features: DMatrix::from_row_slice(n, dim, &values),
        labels,
    })
}

/// Writes a dataset CSV. Pass an empty `labels` slice to omit the label
/// column entirely; otherwise it must have one entry per row.
pub fn write_dataset_csv(
    path: &Path,
    features: &FeatureMatrix,
    labels: &[Option<Label>],
) -> Result<()> {
    if !labels.is_empty() && labels.len() != features.nrows() {
        return Err(Error::LengthMismatch {
            left: features.nrows(),
            right: labels.len(),
        });
    }
    let mut out = BufWriter::new(File::create(path)?);
    let d = features.ncols();
    let mut header: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
    if !labels.is_empty() {
        header.push("label".to_string());
    }
    writeln!(out, "{}", header.join(","))?;
    for i in 0..features.nrows() {
        let mut cells: Vec<String> = (0..d).map(|j| features[(i, j)].to_string()).collect();
        if !labels.is_empty() {
            cells.push(labels[i].map(|l| l.to_string()).unwrap_or_default());
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// A ground-truth row: source index, true label, and whether the point
/// belongs to the rarely labeled subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthRecord {
    pub index: usize,
    pub label: Label,
    pub rare: bool,
}

/// Writes `index,label,rare` rows; `rare` is 0/1.
pub fn write_truth_csv(path: &Path, records: &[TruthRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "index,label,rare")?;
    for r in records {
        writeln!(out, "{},{},{}", r.index, r.label, u8::from(r.rare))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a ground-truth CSV; the `rare` column is optional and defaults to
/// false. Returns the records and whether the mask column was present.
pub fn read_truth_csv(path: &Path) -> Result<(Vec<TruthRecord>, bool)> {
    let file = File::open(path).map_err(|e| parse_err(path, 0, e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let has_rare = headers.iter().any(|h| h == "rare");
    if headers.len() < 2 || &headers[0] != "index" || &headers[1] != "label" {
        return Err(parse_err(path, 1, "expected header index,label[,rare]"));
    }
    let mut records = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| parse_err(path, row, e.to_string()))?;
        let index: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, row, "invalid index"))?;
        let label: Label = record[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, row, "invalid label"))?;
        let rare = if has_rare && record.len() > 2 {
            match record[2].trim() {
                "0" | "false" | "" => false,
                "1" | "true" => true,
                other => {
                    return Err(parse_err(path, row, format!("invalid rare flag {other:?}")))
                }
            }
        } else {
            false
        };
        records.push(TruthRecord { index, label, rare });
    }
    Ok((records, has_rare))
}

/// One row of a predictions CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub index: usize,
    pub label: Label,
    pub error_prob: f64,
    pub in_region: bool,
    /// Posterior per class, ordered as the label set in the header.
    pub posterior: Vec<f64>,
}

/// Writes predictions as
/// `index,label,error_prob,in_region,posterior_<l>...` rows.
pub fn write_predictions_csv(
    path: &Path,
    label_set: &[Label],
    predictions: &[Prediction],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut header = vec![
        "index".to_string(),
        "label".to_string(),
        "error_prob".to_string(),
        "in_region".to_string(),
    ];
    header.extend(label_set.iter().map(|l| format!("posterior_{l}")));
    writeln!(out, "{}", header.join(","))?;
    for (i, p) in predictions.iter().enumerate() {
        if p.posterior.len() != label_set.len() {
            return Err(Error::LengthMismatch {
                left: label_set.len(),
                right: p.posterior.len(),
            });
        }
        let mut cells = vec![
            i.to_string(),
            p.label.to_string(),
            p.error_prob.to_string(),
            p.in_region.to_string(),
        ];
        cells.extend(p.posterior.iter().map(|v| v.to_string()));
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a predictions CSV; returns the label set recovered from the header
/// and the rows.
pub fn read_predictions_csv(path: &Path) -> Result<(Vec<Label>, Vec<PredictionRecord>)> {
    let file = File::open(path).map_err(|e| parse_err(path, 0, e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let fixed = ["index", "label", "error_prob", "in_region"];
    if headers.len() < fixed.len() + 1 {
        return Err(parse_err(path, 1, "too few columns for a predictions file"));
    }
    for (j, expected) in fixed.iter().enumerate() {
        if &headers[j] != *expected {
            return Err(parse_err(
                path,
                1,
                format!("expected column {expected:?}, found {:?}", &headers[j]),
            ));
        }
    }
    let mut label_set = Vec::new();
    for name in headers.iter().skip(fixed.len()) {
        let label = name
            .strip_prefix("posterior_")
            .and_then(|s| s.parse::<Label>().ok())
            .ok_or_else(|| parse_err(path, 1, format!("unexpected column {name:?}")))?;
        label_set.push(label);
    }
    let mut records = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| parse_err(path, row, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(parse_err(path, row, "wrong number of fields"));
        }
        let index: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, row, "invalid index"))?;
        let label: Label = record[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, row, "invalid label"))?;
        let error_prob: f64 = record[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, row, "invalid error_prob"))?;
        let in_region = match record[3].trim() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => return Err(parse_err(path, row, format!("invalid in_region {other:?}"))),
        };
        let mut posterior = Vec::with_capacity(label_set.len());
        for j in 0..label_set.len() {
            let v: f64 = record[fixed.len() + j]
                .trim()
                .parse()
                .map_err(|_| parse_err(path, row, "invalid posterior"))?;
            posterior.push(v);
        }
        records.push(PredictionRecord {
            index,
            label,
            error_prob,
            in_region,
            posterior,
        });
    }
    Ok((label_set, records))
}
