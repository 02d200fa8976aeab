//! Sparse matrix reordering toolkit and learned ordering selector.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`]: CSR storage, permutations, and the symmetrized adjacency graph.
//! - [`mm`]: Matrix Market reading and writing, plus the collection fetcher.
//! - [`features`]: the twelve structural features used by the selector.
//! - [`ordering`]: RCM, minimum degree, nested dissection, and the hybrid ordering.
//! - [`cost`]: symbolic Cholesky cost (elimination game and elimination tree) and labeling.
//! - [`ml`]: scalers, classifiers, cross-validation, grid search, and model files.
//! - [`report`]: solve-time summaries comparing predicted orderings to the AMD baseline.
//! - [`synth`]: generators for synthetic matrix corpora.

pub mod cost;
mod error;
pub mod features;
pub mod matrix;
pub mod ml;
pub mod mm;
pub mod ordering;
pub mod report;
pub mod synth;

pub use cost::{CostReport, EliminationTree, TimingRecord};
pub use error::{Error, Result};
pub use features::{FeatureVector, FEATURE_NAMES};
pub use matrix::{AdjacencyGraph, CsrMatrix, Permutation};
pub use ordering::{LeafOrdering, NdConfig, OrderingLabel};
pub use report::{PredictionRecord, ReportSummary};
