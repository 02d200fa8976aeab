use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::model::{evaluate, train_classifier};
use super::params::{Algorithm, Grid, Params};
use super::rng_stream;
use super::scaler::ScalerKind;
use crate::error::{Error, Result};
use crate::ordering::OrderingLabel;

const SPLIT_STREAM: u64 = 1 << 41;
const FOLD_STREAM: u64 = 1 << 42;

/// A train/test partition of a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    /// Row indices of the source dataset, ascending.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// False when there were too few rows to stratify.
    pub stratified: bool,
}

/// Row indices grouped by class, each group shuffled.
fn shuffled_classes(d: &Dataset, rng: &mut impl rand::Rng) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); OrderingLabel::ALL.len()];
    for (i, l) in d.labels().iter().enumerate() {
        groups[l.index()].push(i);
    }
    for g in &mut groups {
        g.shuffle(rng);
    }
    groups
}

/// Puts `round(ratio · count)` rows of every class in the training part.
pub fn train_test_split(d: &Dataset, ratio: f64, seed: u64) -> Result<Split> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    let mut rng = rng_stream(seed, SPLIT_STREAM);
    let stratified = d.len() >= OrderingLabel::ALL.len();
    let groups = if stratified {
        shuffled_classes(d, &mut rng)
    } else {
        log::warn!("{} rows are too few to stratify; splitting without stratification", d.len());
        let mut all: Vec<usize> = (0..d.len()).collect();
        all.shuffle(&mut rng);
        vec![all]
    };

    let mut train = Vec::new();
    let mut test = Vec::new();
    for g in groups {
        let cut = (ratio * g.len() as f64).round() as usize;
        train.extend_from_slice(&g[..cut]);
        test.extend_from_slice(&g[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train: d.subset(&train),
        test: d.subset(&test),
        train_indices: train,
        test_indices: test,
        stratified,
    })
}

/// Fold number of every row.
fn assign_folds(d: &Dataset, k: usize, seed: u64) -> (Vec<usize>, bool) {
    let mut rng = rng_stream(seed, FOLD_STREAM);
    let counts = d.class_counts();
    let stratified = counts.iter().all(|&c| c == 0 || c >= k);
    let sequence: Vec<usize> = if stratified {
        shuffled_classes(d, &mut rng).concat()
    } else {
        log::warn!("a class has fewer than {k} rows; folds are not stratified");
        let mut all: Vec<usize> = (0..d.len()).collect();
        all.shuffle(&mut rng);
        all
    };
    let mut fold = vec![0; d.len()];
    for (pos, &i) in sequence.iter().enumerate() {
        fold[i] = pos % k;
    }
    (fold, stratified)
}

/// Cross-validated accuracy of one hyperparameter combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvScore {
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    pub stratified: bool,
}

/// k-fold cross-validation. Every fold trains with the same `seed`, so a
/// result depends only on the data, the folds and the hyperparameters.
pub fn kfold_cv(
    d: &Dataset,
    algorithm: Algorithm,
    scaler: ScalerKind,
    params: &Params,
    k: usize,
    seed: u64,
) -> Result<CvScore> {
    if k < 2 {
        return Err(Error::Config(format!("cross-validation needs k >= 2, got {k}")));
    }
    if d.len() < k {
        return Err(Error::Config(format!("{} rows cannot form {k} folds", d.len())));
    }
    let (fold, stratified) = assign_folds(d, k, seed);
    let fold_accuracies = (0..k)
        .into_par_iter()
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..d.len()).partition(|&i| fold[i] == f);
            let model = train_classifier(&d.subset(&train), algorithm, scaler, params, seed)?;
            Ok(evaluate(&model, &d.subset(&test))?.accuracy_percent)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
    Ok(CvScore {
        mean_accuracy,
        fold_accuracies,
        stratified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: Params,
    pub best_score: CvScore,
    /// Every combination with its score, in enumeration order.
    pub table: Vec<(Params, CvScore)>,
}

/// All combinations of `grid`: keys in sorted order, the last key varying
/// fastest, candidates in the order given.
pub fn grid_combinations(grid: &Grid) -> Result<Vec<Params>> {
    if let Some((key, _)) = grid.iter().find(|(_, v)| v.is_empty()) {
        return Err(Error::Config(format!("grid key `{key}` has no candidates")));
    }
    let mut combos = vec![Params::new()];
    for (key, values) in grid {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.insert(key.clone(), v.clone());
                    c
                })
            })
            .collect();
    }
    Ok(combos)
}

/// Cross-validates every combination of `grid` and keeps the best mean
/// accuracy; ties go to the earliest combination.
pub fn grid_search(
    d: &Dataset,
    algorithm: Algorithm,
    scaler: ScalerKind,
    grid: &Grid,
    k: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    let combos = grid_combinations(grid)?;
    let table = combos
        .into_par_iter()
        .map(|c| {
            let score = kfold_cv(d, algorithm, scaler, &c, k, seed)?;
            Ok((c, score))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, (_, s)) in table.iter().enumerate() {
        if s.mean_accuracy > table[best].1.mean_accuracy {
            best = i;
        }
    }
    let (best_params, best_score) = table[best].clone();
    Ok(GridSearchResult {
        best: best_params,
        best_score,
        table,
    })
}
