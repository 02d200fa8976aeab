use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::ordering::OrderingLabel;

pub const N_FEATURES: usize = FEATURE_NAMES.len();

/// Column names of the dataset CSV: matrix name, the twelve features, label.
pub const DATASET_HEADER: [&str; 14] = [
    "matrix",
    "dimension",
    "nnz",
    "nnz_ratio",
    "nnz_max",
    "nnz_min",
    "nnz_avg",
    "nnz_std",
    "degree_max",
    "degree_min",
    "degree_avg",
    "bandwidth",
    "profile",
    "label",
];

/// One CSV row; the label is empty until the matrix has been labelled.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub matrix: String,
    pub features: [f64; N_FEATURES],
    pub label: Option<OrderingLabel>,
}

impl FeatureRow {
    pub fn new(matrix: impl Into<String>, features: &FeatureVector) -> Self {
        FeatureRow {
            matrix: matrix.into(),
            features: features.to_array(),
            label: None,
        }
    }
}

/// Labelled feature rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    x: Vec<[f64; N_FEATURES]>,
    y: Vec<OrderingLabel>,
}

impl Dataset {
    pub fn new(names: Vec<String>, x: Vec<[f64; N_FEATURES]>, y: Vec<OrderingLabel>) -> Result<Self> {
        if names.len() != x.len() || x.len() != y.len() {
            return Err(Error::InvalidDataset(format!(
                "{} names, {} feature rows, {} labels",
                names.len(),
                x.len(),
                y.len()
            )));
        }
        if let Some(i) = x.iter().position(|row| row.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidDataset(format!(
                "row `{}` has a non-finite feature",
                names[i]
            )));
        }
        Ok(Dataset { names, x, y })
    }

    /// Builds a dataset from CSV rows, all of which must carry a label.
    pub fn from_rows(rows: Vec<FeatureRow>) -> Result<Self> {
        let mut names = Vec::with_capacity(rows.len());
        let mut x = Vec::with_capacity(rows.len());
        let mut y = Vec::with_capacity(rows.len());
        for row in rows {
            let label = row
                .label
                .ok_or_else(|| Error::InvalidDataset(format!("row `{}` has no label", row.matrix)))?;
            names.push(row.matrix);
            x.push(row.features);
            y.push(label);
        }
        Dataset::new(names, x, y)
    }

    pub fn to_rows(&self) -> Vec<FeatureRow> {
        (0..self.len())
            .map(|i| FeatureRow {
                matrix: self.names[i].clone(),
                features: self.x[i],
                label: Some(self.y[i]),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn features(&self) -> &[[f64; N_FEATURES]] {
        &self.x
    }

    pub fn labels(&self) -> &[OrderingLabel] {
        &self.y
    }

    pub(crate) fn class_indices(&self) -> Vec<usize> {
        self.y.iter().map(|l| l.index()).collect()
    }

    /// Number of rows per label, in [`OrderingLabel::ALL`] order.
    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for l in &self.y {
            counts[l.index()] += 1;
        }
        counts
    }

    pub fn n_classes_present(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            names: indices.iter().map(|&i| self.names[i].clone()).collect(),
            x: indices.iter().map(|&i| self.x[i]).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

pub fn write_dataset_csv(writer: impl Write, rows: &[FeatureRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DATASET_HEADER)?;
    for row in rows {
        let mut record = Vec::with_capacity(DATASET_HEADER.len());
        record.push(row.matrix.clone());
        // `{}` on f64 is the shortest string that parses back exactly
        record.extend(row.features.iter().map(|v| format!("{v}")));
        record.push(row.label.map(|l| l.to_string()).unwrap_or_default());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the dataset CSV. Columns are located by header name.
pub fn read_dataset_csv(reader: impl Read) -> Result<Vec<FeatureRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Schema(format!("dataset CSV lacks a `{name}` column")))
    };
    let name_col = column("matrix")?;
    let label_col = column("label").ok();
    let feature_cols: Vec<usize> = FEATURE_NAMES.iter().map(|f| column(f)).collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let mut features = [0.0; N_FEATURES];
        for (slot, &col) in features.iter_mut().zip(&feature_cols) {
            let cell = record.get(col).unwrap_or("");
            *slot = cell
                .parse()
                .map_err(|_| Error::parse(line, format!("bad {} value `{cell}`", headers.get(col).unwrap_or("?"))))?;
        }
        let label = match label_col.and_then(|c| record.get(c)) {
            None | Some("") => None,
            Some(text) => Some(text.parse().map_err(|_| Error::parse(line, format!("bad label `{text}`")))?),
        };
        rows.push(FeatureRow {
            matrix: record.get(name_col).unwrap_or("").to_string(),
            features,
            label,
        });
    }
    Ok(rows)
}
