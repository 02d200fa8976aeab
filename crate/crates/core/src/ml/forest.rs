use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::N_FEATURES;
use super::params::ForestParams;
use super::tree::DecisionTree;
use super::{argmax_votes, rng_stream};

/// Bootstrap streams live in their own range so tree `t` of a forest draws
/// features from the same stream as a standalone tree fitted with that seed.
const BOOTSTRAP_STREAM: u64 = 1 << 40;

/// Bagged CART trees; prediction is a majority vote over trees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

impl RandomForest {
    pub fn fit(x: &[[f64; N_FEATURES]], y: &[usize], n_classes: usize, params: &ForestParams, seed: u64) -> Self {
        let n = x.len();
        let trees = (0..params.n_estimators as u64)
            .into_par_iter()
            .map(|t| {
                let samples: Vec<usize> = if params.bootstrap {
                    let mut rng = rng_stream(seed, BOOTSTRAP_STREAM + t);
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(x, y, n_classes, samples, &params.tree, &mut rng_stream(seed, t))
            })
            .collect();
        RandomForest { trees, n_classes }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict(row)] += 1;
        }
        argmax_votes(&votes)
    }
}
