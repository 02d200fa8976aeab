use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    DecisionTree,
    RandomForest,
    Knn,
    NaiveBayes,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::DecisionTree,
        Algorithm::RandomForest,
        Algorithm::Knn,
        Algorithm::NaiveBayes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Knn => "knn",
            Algorithm::NaiveBayes => "naive_bayes",
        }
    }

    /// Grid searched when the caller gives none.
    pub fn default_grid(self) -> Grid {
        let ints = |v: &[i64]| v.iter().map(|&i| ParamValue::Int(i)).collect::<Vec<_>>();
        let mut grid = Grid::new();
        match self {
            Algorithm::DecisionTree => {
                grid.insert("max_depth".into(), vec![ParamValue::None, ParamValue::Int(8)]);
                grid.insert("min_samples_leaf".into(), ints(&[1, 5]));
                grid.insert("min_samples_split".into(), ints(&[2, 5]));
            }
            Algorithm::RandomForest => {
                grid.insert("criterion".into(), vec![ParamValue::Str("gini".into())]);
                grid.insert("n_estimators".into(), ints(&[100]));
                grid.insert("min_samples_leaf".into(), ints(&[1, 5]));
                grid.insert("min_samples_split".into(), ints(&[2, 5]));
            }
            Algorithm::Knn => {
                grid.insert("k".into(), ints(&[1, 3, 5, 7]));
            }
            Algorithm::NaiveBayes => {
                grid.insert("var_smoothing".into(), vec![ParamValue::Float(1e-9)]);
            }
        }
        grid
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "decision_tree" | "tree" | "dt" => Ok(Algorithm::DecisionTree),
            "random_forest" | "forest" | "rf" => Ok(Algorithm::RandomForest),
            "knn" | "k_nearest_neighbors" => Ok(Algorithm::Knn),
            "naive_bayes" | "nb" | "gaussian_nb" => Ok(Algorithm::NaiveBayes),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// A single hyperparameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    None,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::None => f.write_str("none"),
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x:?}"),
            ParamValue::Str(s) => f.write_str(s),
        }
    }
}

impl FromStr for ParamValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Config("empty hyperparameter value".into()));
        }
        Ok(match s.to_ascii_lowercase().as_str() {
            "none" | "null" => ParamValue::None,
            "true" => ParamValue::Bool(true),
            "false" => ParamValue::Bool(false),
            _ => {
                if let Ok(i) = s.parse::<i64>() {
                    ParamValue::Int(i)
                } else if let Ok(x) = s.parse::<f64>() {
                    ParamValue::Float(x)
                } else {
                    ParamValue::Str(s.to_string())
                }
            }
        })
    }
}

/// One hyperparameter assignment. Keys are kept sorted.
pub type Params = BTreeMap<String, ParamValue>;

/// Candidate values per hyperparameter. Enumeration order is sorted key
/// order, then candidate-list order, with the last key varying fastest.
pub type Grid = BTreeMap<String, Vec<ParamValue>>;

/// Parses `key=v1,v2;key2=v3` into a grid.
pub fn parse_grid(spec: &str) -> Result<Grid> {
    let mut grid = Grid::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("grid entry `{part}` is not key=values")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("grid entry `{part}` has no key")));
        }
        let values: Vec<ParamValue> = values
            .split(',')
            .map(|v| v.parse())
            .collect::<Result<_>>()?;
        if grid.insert(key.to_string(), values).is_some() {
            return Err(Error::Config(format!("grid key `{key}` given twice")));
        }
    }
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features considered per split; `None` means all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub tree: TreeParams,
    pub n_estimators: usize,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            tree: TreeParams {
                // ⌈√12⌉
                max_features: Some(4),
                ..TreeParams::default()
            },
            n_estimators: 100,
            bootstrap: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    pub var_smoothing: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { var_smoothing: 1e-9 }
    }
}

/// Validated hyperparameters for one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassifierConfig {
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    Knn(KnnParams),
    NaiveBayes(NbParams),
}

impl ClassifierConfig {
    /// Applies `params` over the algorithm's defaults. Unknown keys and
    /// out-of-range values are configuration errors.
    pub fn from_params(algorithm: Algorithm, params: &Params) -> Result<Self> {
        let mut cfg = match algorithm {
            Algorithm::DecisionTree => ClassifierConfig::DecisionTree(TreeParams::default()),
            Algorithm::RandomForest => ClassifierConfig::RandomForest(ForestParams::default()),
            Algorithm::Knn => ClassifierConfig::Knn(KnnParams::default()),
            Algorithm::NaiveBayes => ClassifierConfig::NaiveBayes(NbParams::default()),
        };
        for (key, value) in params {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &ParamValue) -> Result<()> {
        let bad = || Error::Config(format!("invalid value `{value}` for `{key}`"));
        let count = || match value {
            ParamValue::Int(i) if *i >= 0 => Ok(*i as usize),
            _ => Err(bad()),
        };
        let optional_count = || match value {
            ParamValue::None => Ok(None),
            _ => count().map(Some),
        };
        let tree_key = |tree: &mut TreeParams| -> Result<bool> {
            match key {
                "criterion" => match value {
                    ParamValue::Str(s) if s.eq_ignore_ascii_case("gini") => {}
                    _ => return Err(Error::Config(format!("only the gini criterion is supported, got `{value}`"))),
                },
                "max_depth" => tree.max_depth = optional_count()?,
                "min_samples_split" => tree.min_samples_split = count()?,
                "min_samples_leaf" => tree.min_samples_leaf = count()?,
                "max_features" => tree.max_features = optional_count()?,
                _ => return Ok(false),
            }
            Ok(true)
        };
        let known = match self {
            ClassifierConfig::DecisionTree(tree) => tree_key(tree)?,
            ClassifierConfig::RandomForest(forest) => match key {
                "n_estimators" => {
                    forest.n_estimators = count()?;
                    true
                }
                "bootstrap" => {
                    forest.bootstrap = match value {
                        ParamValue::Bool(b) => *b,
                        _ => return Err(bad()),
                    };
                    true
                }
                _ => tree_key(&mut forest.tree)?,
            },
            ClassifierConfig::Knn(knn) => match key {
                "k" | "n_neighbors" => {
                    knn.k = count()?;
                    true
                }
                _ => false,
            },
            ClassifierConfig::NaiveBayes(nb) => match key {
                "var_smoothing" => {
                    nb.var_smoothing = match value {
                        ParamValue::Float(x) => *x,
                        ParamValue::Int(i) => *i as f64,
                        _ => return Err(bad()),
                    };
                    true
                }
                _ => false,
            },
        };
        if known {
            Ok(())
        } else {
            Err(Error::Config(format!("unknown hyperparameter `{key}`")))
        }
    }

    fn validate(&self) -> Result<()> {
        let check_tree = |t: &TreeParams| {
            if t.min_samples_leaf == 0 {
                return Err(Error::Config("min_samples_leaf must be at least 1".into()));
            }
            if t.min_samples_split < 2 {
                return Err(Error::Config("min_samples_split must be at least 2".into()));
            }
            if t.max_features == Some(0) {
                return Err(Error::Config("max_features must be at least 1".into()));
            }
            Ok(())
        };
        match self {
            ClassifierConfig::DecisionTree(t) => check_tree(t),
            ClassifierConfig::RandomForest(f) => {
                if f.n_estimators == 0 {
                    return Err(Error::Config("n_estimators must be at least 1".into()));
                }
                check_tree(&f.tree)
            }
            ClassifierConfig::Knn(k) if k.k == 0 => Err(Error::Config("k must be at least 1".into())),
            ClassifierConfig::NaiveBayes(nb) if !(nb.var_smoothing >= 0.0 && nb.var_smoothing.is_finite()) => {
                Err(Error::Config("var_smoothing must be a finite non-negative number".into()))
            }
            _ => Ok(()),
        }
    }
}
