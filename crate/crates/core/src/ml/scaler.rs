use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::N_FEATURES;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalerKind {
    /// `(x - mean) / std` with the population standard deviation.
    Standardization,
    /// `(x - min) / (max - min)`.
    MinMax,
}

impl fmt::Display for ScalerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalerKind::Standardization => "standardization",
            ScalerKind::MinMax => "minmax",
        })
    }
}

impl FromStr for ScalerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "standardization" | "standard" | "zscore" => Ok(ScalerKind::Standardization),
            "minmax" | "maxmin" => Ok(ScalerKind::MinMax),
            other => Err(Error::Config(format!("unknown scaler `{other}`"))),
        }
    }
}

/// Per-feature affine map `x -> (x - offset) / scale`. A zero scale marks a
/// constant column, which maps to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub kind: ScalerKind,
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl ScalerParams {
    pub fn transform_row(&self, row: &[f64]) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for (j, slot) in out.iter_mut().enumerate() {
            if self.scale[j] != 0.0 {
                *slot = (row[j] - self.offset[j]) / self.scale[j];
            }
        }
        out
    }

    pub(crate) fn is_consistent(&self) -> bool {
        self.offset.len() == N_FEATURES
            && self.scale.len() == N_FEATURES
            && self.scale.iter().all(|s| s.is_finite() && *s >= 0.0)
            && self.offset.iter().all(|o| o.is_finite())
    }
}

pub fn fit_scaler(x: &[[f64; N_FEATURES]], kind: ScalerKind) -> Result<ScalerParams> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = x.len() as f64;
    let mut offset = vec![0.0; N_FEATURES];
    let mut scale = vec![0.0; N_FEATURES];
    for j in 0..N_FEATURES {
        let column = x.iter().map(|row| row[j]);
        let (lo, hi) = column
            .clone()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo == hi {
            offset[j] = lo;
            continue;
        }
        match kind {
            ScalerKind::Standardization => {
                let mean = column.clone().sum::<f64>() / n;
                let var = column.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                offset[j] = mean;
                scale[j] = var.sqrt();
            }
            ScalerKind::MinMax => {
                offset[j] = lo;
                scale[j] = hi - lo;
            }
        }
    }
    Ok(ScalerParams { kind, offset, scale })
}

pub fn apply_scaler(params: &ScalerParams, x: &[[f64; N_FEATURES]]) -> Vec<[f64; N_FEATURES]> {
    x.iter().map(|row| params.transform_row(row)).collect()
}
