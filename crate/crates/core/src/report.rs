//! Solve-time comparison of predicted orderings against the AMD baseline.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cost::TimingRecord;
use crate::error::{Error, Result};
use crate::ordering::OrderingLabel;

/// One line of a predictions CSV: `matrix,label[,seconds]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub matrix: String,
    pub label: OrderingLabel,
    /// Wall time spent predicting, when recorded.
    #[serde(default)]
    pub seconds: Option<f64>,
}

/// Reads a predictions CSV. Labels parse case-insensitively, and `SCOTCH`
/// is accepted for the hybrid category.
pub fn read_predictions(reader: impl Read) -> Result<Vec<PredictionRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for want in ["matrix", "label"] {
        if !headers.iter().any(|h| h == want) {
            return Err(Error::Schema(format!("predictions CSV lacks a `{want}` column")));
        }
    }
    rdr.deserialize::<RawPrediction>()
        .map(|r| {
            let r = r?;
            Ok(PredictionRecord {
                label: r.label.parse()?,
                matrix: r.matrix,
                seconds: r.seconds,
            })
        })
        .collect()
}

#[derive(Deserialize)]
struct RawPrediction {
    matrix: String,
    label: String,
    #[serde(default)]
    seconds: Option<f64>,
}

/// Writes `matrix,label,seconds`, or `matrix,label` when `with_times` is false.
pub fn write_predictions(writer: impl Write, rows: &[PredictionRecord], with_times: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if with_times {
        w.write_record(["matrix", "label", "seconds"])?;
    } else {
        w.write_record(["matrix", "label"])?;
    }
    for r in rows {
        let mut rec = vec![r.matrix.clone(), r.label.to_string()];
        if with_times {
            rec.push(r.seconds.map(|s| format!("{s:.6}")).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub matrix: String,
    pub predicted_label: OrderingLabel,
    /// AMD time.
    pub baseline: f64,
    /// Time under the predicted ordering.
    pub predicted: f64,
    /// Shortest time among the recorded orderings.
    pub ideal: f64,
    /// `baseline / predicted`.
    pub speedup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub rows: Vec<ReportRow>,
    pub total_time_baseline: f64,
    pub total_time_predicted: f64,
    pub total_time_ideal: f64,
    pub reduction_percent: f64,
    pub mean_speedup: f64,
    /// How much longer the predicted total is than the ideal total, in percent.
    pub overhead_vs_ideal_percent: f64,
    /// Sum of recorded prediction times; `None` if no row carried one.
    pub total_prediction_time: Option<f64>,
}

/// `100 · (baseline − predicted) / baseline`.
pub fn reduction_percent(baseline: f64, predicted: f64) -> f64 {
    100.0 * (baseline - predicted) / baseline
}

fn missing_keys(from: &[&str], present: &HashSet<&str>) -> Vec<String> {
    from.iter().filter(|k| !present.contains(*k)).map(|k| k.to_string()).collect()
}

fn unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<(Vec<&'a str>, HashSet<&'a str>)> {
    let mut order = Vec::new();
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Report(format!("matrix `{n}` appears twice in the {what}")));
        }
        order.push(n);
    }
    Ok((order, seen))
}

/// Joins timings and predictions by matrix name. Both files must cover
/// exactly the same matrices; rows follow the predictions' order.
pub fn build_report(timings: &[TimingRecord], predictions: &[PredictionRecord]) -> Result<ReportSummary> {
    let (t_order, t_set) = unique(timings.iter().map(|t| t.matrix.as_str()), "timings")?;
    let (p_order, p_set) = unique(predictions.iter().map(|p| p.matrix.as_str()), "predictions")?;
    let no_timing = missing_keys(&p_order, &t_set);
    let no_prediction = missing_keys(&t_order, &p_set);
    if !no_timing.is_empty() || !no_prediction.is_empty() {
        let mut msg = String::from("timings and predictions cover different matrices");
        if !no_timing.is_empty() {
            let _ = write!(msg, "; no timing row for {}", no_timing.join(", "));
        }
        if !no_prediction.is_empty() {
            let _ = write!(msg, "; no prediction for {}", no_prediction.join(", "));
        }
        return Err(Error::Report(msg));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let by_name: HashMap<&str, &TimingRecord> = timings.iter().map(|t| (t.matrix.as_str(), t)).collect();
    let time = |rec: &TimingRecord, label: OrderingLabel| {
        rec.time(label)
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| Error::IncompleteRecord {
                matrix: rec.matrix.clone(),
                missing: label.to_string(),
            })
    };
    let mut rows = Vec::with_capacity(predictions.len());
    for p in predictions {
        let rec = by_name[p.matrix.as_str()];
        let baseline = time(rec, OrderingLabel::Amd)?;
        let predicted = time(rec, p.label)?;
        let ideal = OrderingLabel::ALL
            .iter()
            .filter_map(|&l| time(rec, l).ok())
            .fold(f64::INFINITY, f64::min);
        rows.push(ReportRow {
            matrix: p.matrix.clone(),
            predicted_label: p.label,
            baseline,
            predicted,
            ideal,
            speedup: baseline / predicted,
        });
    }

    let total_time_baseline: f64 = rows.iter().map(|r| r.baseline).sum();
    let total_time_predicted: f64 = rows.iter().map(|r| r.predicted).sum();
    let total_time_ideal: f64 = rows.iter().map(|r| r.ideal).sum();
    let mean_speedup = rows.iter().map(|r| r.speedup).sum::<f64>() / rows.len() as f64;
    let seconds: Vec<f64> = predictions.iter().filter_map(|p| p.seconds).collect();
    Ok(ReportSummary {
        reduction_percent: reduction_percent(total_time_baseline, total_time_predicted),
        overhead_vs_ideal_percent: 100.0 * (total_time_predicted - total_time_ideal) / total_time_ideal,
        total_prediction_time: (!seconds.is_empty()).then(|| seconds.iter().sum()),
        rows,
        total_time_baseline,
        total_time_predicted,
        total_time_ideal,
        mean_speedup,
    })
}

impl ReportSummary {
    /// Human-readable table followed by the summary statistics.
    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.matrix.len()).max().unwrap_or(6).max(6);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>12}  {:>12}  {:>12}  {:>8}",
            "matrix", "label", "amd(s)", "predicted(s)", "ideal(s)", "speedup"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>7}  {:>12.4}  {:>12.4}  {:>12.4}  {:>8.2}",
                r.matrix, r.predicted_label, r.baseline, r.predicted, r.ideal, r.speedup
            );
        }
        let _ = writeln!(out, "total amd time        {:.4}", self.total_time_baseline);
        let _ = writeln!(out, "total predicted time  {:.4}", self.total_time_predicted);
        let _ = writeln!(out, "total ideal time      {:.4}", self.total_time_ideal);
        let _ = writeln!(out, "reduction vs amd      {:.2}%", self.reduction_percent);
        let _ = writeln!(out, "overhead vs ideal     {:.2}%", self.overhead_vs_ideal_percent);
        let _ = writeln!(out, "mean speedup          {:.2}", self.mean_speedup);
        if let Some(t) = self.total_prediction_time {
            let _ = writeln!(out, "total prediction time {t:.4}");
        }
        out
    }

    /// Per-matrix rows as `matrix,label,amd,predicted,ideal,speedup`.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["matrix", "label", "amd", "predicted", "ideal", "speedup"])?;
        for r in &self.rows {
            w.write_record([
                r.matrix.clone(),
                r.predicted_label.to_string(),
                r.baseline.to_string(),
                r.predicted.to_string(),
                r.ideal.to_string(),
                r.speedup.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
