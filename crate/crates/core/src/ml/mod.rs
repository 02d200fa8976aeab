//! Supervised selection of an ordering from matrix features.
//!
//! Everything here is deterministic for a fixed seed, independent of the
//! number of worker threads: per-tree and per-fold random streams are derived
//! from the master seed, and parallel results are collected in index order.

mod bayes;
mod dataset;
mod forest;
mod knn;
mod model;
mod params;
mod scaler;
mod selection;
mod tree;

pub use bayes::NaiveBayes;
pub use dataset::{read_dataset_csv, write_dataset_csv, Dataset, FeatureRow, DATASET_HEADER, N_FEATURES};
pub use forest::RandomForest;
pub use knn::Knn;
pub use model::{
    evaluate, load_model, save_model, train_classifier, Classifier, EvalReport, Prediction, TrainedModel,
    FORMAT_VERSION,
};
pub use params::{
    parse_grid, Algorithm, ClassifierConfig, ForestParams, Grid, KnnParams, NbParams, ParamValue, Params, TreeParams,
};
pub use scaler::{apply_scaler, fit_scaler, ScalerKind, ScalerParams};
pub use selection::{grid_combinations, grid_search, kfold_cv, train_test_split, CvScore, GridSearchResult, Split};
pub use tree::{DecisionTree, Node};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random stream `stream` of the master `seed`.
pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Class with the most votes; ties go to the lower class index.
pub(crate) fn argmax_votes(votes: &[usize]) -> usize {
    let mut best = 0;
    for (k, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = k;
        }
    }
    best
}
