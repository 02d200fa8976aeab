use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bayes::NaiveBayes;
use super::dataset::{Dataset, N_FEATURES};
use super::forest::RandomForest;
use super::knn::Knn;
use super::params::{Algorithm, ClassifierConfig, Params};
use super::rng_stream;
use super::scaler::{apply_scaler, fit_scaler, ScalerKind, ScalerParams};
use super::tree::DecisionTree;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::ordering::OrderingLabel;

/// Model file format written by this build.
pub const FORMAT_VERSION: u64 = 1;

/// A fitted classifier over scaled features, predicting class indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    Knn(Knn),
    NaiveBayes(NaiveBayes),
}

impl Classifier {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Classifier::DecisionTree(_) => Algorithm::DecisionTree,
            Classifier::RandomForest(_) => Algorithm::RandomForest,
            Classifier::Knn(_) => Algorithm::Knn,
            Classifier::NaiveBayes(_) => Algorithm::NaiveBayes,
        }
    }

    pub fn predict(&self, scaled: &[f64]) -> usize {
        match self {
            Classifier::DecisionTree(t) => t.predict(scaled),
            Classifier::RandomForest(f) => f.predict(scaled),
            Classifier::Knn(k) => k.predict(scaled),
            Classifier::NaiveBayes(nb) => nb.predict(scaled),
        }
    }

    fn is_consistent(&self, n_classes: usize) -> bool {
        match self {
            Classifier::DecisionTree(t) => t.n_classes == n_classes && t.is_consistent(),
            Classifier::RandomForest(f) => {
                f.n_classes == n_classes
                    && !f.trees.is_empty()
                    && f.trees.iter().all(|t| t.n_classes == n_classes && t.is_consistent())
            }
            Classifier::Knn(k) => {
                k.n_classes == n_classes
                    && k.k >= 1
                    && !k.x.is_empty()
                    && k.x.len() == k.y.len()
                    && k.y.iter().all(|&c| c < n_classes)
            }
            Classifier::NaiveBayes(nb) => {
                nb.priors.len() == n_classes
                    && nb.means.len() == n_classes
                    && nb.variances.len() == n_classes
                    && nb.means.iter().chain(&nb.variances).all(|v| v.len() == N_FEATURES)
                    && nb.variances.iter().flatten().all(|&v| v > 0.0)
            }
        }
    }
}

/// Scaler, fitted classifier, and the schemas needed to use them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u64,
    pub algorithm: Algorithm,
    pub hyperparams: Params,
    pub seed: u64,
    pub feature_schema: Vec<String>,
    pub label_schema: Vec<OrderingLabel>,
    pub scaler: ScalerParams,
    pub classifier: Classifier,
    /// Non-fatal conditions met during training, such as a single-class
    /// training set (the model then predicts that class for every input).
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// A predicted label and the wall time spent producing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub label: OrderingLabel,
    pub seconds: f64,
}

impl TrainedModel {
    /// Predicts from raw (unscaled) features in `feature_schema` order.
    pub fn predict(&self, row: &[f64]) -> Result<OrderingLabel> {
        if row.len() != self.feature_schema.len() {
            return Err(Error::Schema(format!(
                "model expects {} features, got {}",
                self.feature_schema.len(),
                row.len()
            )));
        }
        let scaled = self.scaler.transform_row(row);
        let class = self.classifier.predict(&scaled);
        Ok(self.label_schema[class])
    }

    /// Predicts from a [`FeatureVector`], checking that the model was trained
    /// on the canonical feature order.
    pub fn predict_features(&self, features: &FeatureVector) -> Result<Prediction> {
        let start = Instant::now();
        self.check_schema()?;
        let label = self.predict(&features.to_array())?;
        Ok(Prediction {
            label,
            seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn predict_batch(&self, rows: &[[f64; N_FEATURES]]) -> Result<Vec<OrderingLabel>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn check_schema(&self) -> Result<()> {
        if self.feature_schema.iter().map(String::as_str).ne(FEATURE_NAMES) {
            return Err(Error::Schema(format!(
                "model features {:?} differ from {:?}",
                self.feature_schema, FEATURE_NAMES
            )));
        }
        if self.label_schema != OrderingLabel::ALL {
            return Err(Error::Schema(format!(
                "model labels {:?} differ from {:?}",
                self.label_schema,
                OrderingLabel::ALL
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }

    /// Parses a model file. A newer `format_version` is rejected before the
    /// rest of the document is interpreted.
    pub fn from_json(text: &str) -> Result<TrainedModel> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::ModelParse(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::ModelParse("missing format_version".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let model: TrainedModel = serde_json::from_value(value).map_err(|e| Error::ModelParse(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::ModelParse(what.to_string()));
        if self.feature_schema.len() != N_FEATURES {
            return bad("feature_schema must list 12 features");
        }
        if self.label_schema.is_empty() {
            return bad("label_schema is empty");
        }
        if !self.scaler.is_consistent() {
            return bad("scaler parameters are inconsistent");
        }
        if self.classifier.algorithm() != self.algorithm {
            return bad("classifier kind does not match algorithm");
        }
        if !self.classifier.is_consistent(self.label_schema.len()) {
            return bad("classifier parameters are inconsistent");
        }
        Ok(())
    }
}

/// Fits `scaler` and then the classifier on `d`.
///
/// A training set with a single class yields a model that always predicts
/// that class, with a warning recorded on the model.
pub fn train_classifier(
    d: &Dataset,
    algorithm: Algorithm,
    scaler: ScalerKind,
    params: &Params,
    seed: u64,
) -> Result<TrainedModel> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let config = ClassifierConfig::from_params(algorithm, params)?;
    let scaler_params = fit_scaler(d.features(), scaler)?;
    let x = apply_scaler(&scaler_params, d.features());
    let y = d.class_indices();
    let n_classes = OrderingLabel::ALL.len();

    let mut warnings = Vec::new();
    if d.n_classes_present() == 1 {
        warnings.push(format!(
            "training set has the single class {}; the model is a constant predictor",
            d.labels()[0]
        ));
    }

    let classifier = match config {
        ClassifierConfig::DecisionTree(p) => {
            let samples = (0..x.len()).collect();
            Classifier::DecisionTree(DecisionTree::fit(&x, &y, n_classes, samples, &p, &mut rng_stream(seed, 0)))
        }
        ClassifierConfig::RandomForest(p) => Classifier::RandomForest(RandomForest::fit(&x, &y, n_classes, &p, seed)),
        ClassifierConfig::Knn(p) => {
            if p.k > x.len() {
                return Err(Error::Config(format!(
                    "k = {} exceeds the {} training rows",
                    p.k,
                    x.len()
                )));
            }
            Classifier::Knn(Knn::fit(&x, &y, n_classes, p.k))
        }
        ClassifierConfig::NaiveBayes(p) => Classifier::NaiveBayes(NaiveBayes::fit(&x, &y, n_classes, p.var_smoothing)),
    };

    Ok(TrainedModel {
        format_version: FORMAT_VERSION,
        algorithm,
        hyperparams: params.clone(),
        seed,
        feature_schema: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        label_schema: OrderingLabel::ALL.to_vec(),
        scaler: scaler_params,
        classifier,
        warnings,
    })
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model.to_json())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    TrainedModel::from_json(&fs::read_to_string(path)?)
}

/// Accuracy and confusion counts of a model on a labelled set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// `100 · p_true / p_all`.
    pub accuracy_percent: f64,
    pub p_true: usize,
    pub p_all: usize,
    /// `confusion[true][predicted]`, indexed by [`OrderingLabel::index`].
    pub confusion: [[usize; 4]; 4],
    pub predictions: Vec<OrderingLabel>,
}

impl EvalReport {
    pub fn from_predictions(truth: &[OrderingLabel], predicted: Vec<OrderingLabel>) -> Result<EvalReport> {
        if truth.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut confusion = [[0usize; 4]; 4];
        for (t, p) in truth.iter().zip(&predicted) {
            confusion[t.index()][p.index()] += 1;
        }
        let p_true = (0..4).map(|k| confusion[k][k]).sum();
        let p_all = truth.len();
        Ok(EvalReport {
            accuracy_percent: 100.0 * p_true as f64 / p_all as f64,
            p_true,
            p_all,
            confusion,
            predictions: predicted,
        })
    }
}

pub fn evaluate(model: &TrainedModel, test: &Dataset) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    model.check_schema()?;
    let predicted = model.predict_batch(test.features())?;
    EvalReport::from_predictions(test.labels(), predicted)
}
