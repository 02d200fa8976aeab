//! Fill- and bandwidth-reducing orderings.
//!
//! One representative per category: reverse Cuthill-McKee (bandwidth
//! reduction), approximate minimum degree (fill reduction), level-structure
//! nested dissection (graph based), and nested dissection with minimum-degree
//! leaves (hybrid). Every ordering returns a [`Permutation`] with
//! `perm[old] = new`; ties always go to the lowest original index.

mod amd;
mod level;
mod nd;
mod rcm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{AdjacencyGraph, CsrMatrix, Permutation};

pub use amd::minimum_degree_ordering;
pub use level::pseudo_peripheral_vertex;
pub use nd::{hybrid_ordering, nested_dissection_ordering, nested_dissection_traced, DissectionStep};
pub use rcm::rcm_ordering;

/// Ordering category, also the selector's class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OrderingLabel {
    Rcm,
    Amd,
    Nd,
    Hybrid,
}

impl OrderingLabel {
    /// Canonical label order, used for class indices and vote tie-breaking.
    pub const ALL: [OrderingLabel; 4] = [
        OrderingLabel::Rcm,
        OrderingLabel::Amd,
        OrderingLabel::Nd,
        OrderingLabel::Hybrid,
    ];

    /// Tie-break precedence for cost and timing argmins: AMD first.
    pub const PRECEDENCE: [OrderingLabel; 4] = [
        OrderingLabel::Amd,
        OrderingLabel::Hybrid,
        OrderingLabel::Nd,
        OrderingLabel::Rcm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderingLabel::Rcm => "RCM",
            OrderingLabel::Amd => "AMD",
            OrderingLabel::Nd => "ND",
            OrderingLabel::Hybrid => "HYBRID",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for OrderingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderingLabel {
    type Err = Error;

    /// Case-insensitive; `SCOTCH` and `PORD` map to the hybrid category.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RCM" => Ok(OrderingLabel::Rcm),
            "AMD" | "MD" => Ok(OrderingLabel::Amd),
            "ND" => Ok(OrderingLabel::Nd),
            "HYBRID" | "SCOTCH" | "PORD" => Ok(OrderingLabel::Hybrid),
            other => Err(Error::Config(format!("unknown ordering label `{other}`"))),
        }
    }
}

/// How subgraphs at or below the leaf threshold are ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafOrdering {
    Natural,
    MinimumDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NdConfig {
    pub leaf_threshold: usize,
    pub leaf_ordering: LeafOrdering,
}

impl Default for NdConfig {
    fn default() -> Self {
        NdConfig {
            leaf_threshold: 32,
            leaf_ordering: LeafOrdering::Natural,
        }
    }
}

impl NdConfig {
    pub fn new(leaf_threshold: usize, leaf_ordering: LeafOrdering) -> Result<Self> {
        let cfg = NdConfig {
            leaf_threshold,
            leaf_ordering,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.leaf_threshold < 2 {
            return Err(Error::Config(format!(
                "leaf_threshold must be at least 2, got {}",
                self.leaf_threshold
            )));
        }
        Ok(())
    }
}

/// Ordering for `label` on a graph, with default nested-dissection settings.
pub fn order_graph(g: &AdjacencyGraph, label: OrderingLabel) -> Permutation {
    let cfg = NdConfig::default();
    match label {
        OrderingLabel::Rcm => rcm_ordering(g),
        OrderingLabel::Amd => minimum_degree_ordering(g),
        OrderingLabel::Nd => nested_dissection_ordering(g, &cfg),
        OrderingLabel::Hybrid => hybrid_ordering(g, &cfg),
    }
}

/// Symmetrizes `m` and runs the ordering matching `label`.
pub fn order_by_label(m: &CsrMatrix, label: OrderingLabel) -> Result<Permutation> {
    let g = m.symmetrize()?;
    Ok(order_graph(&g, label))
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use crate::matrix::AdjacencyGraph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn path(n: usize) -> AdjacencyGraph {
        AdjacencyGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn star(leaves: usize) -> AdjacencyGraph {
        AdjacencyGraph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    pub fn grid(rows: usize, cols: usize) -> AdjacencyGraph {
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        AdjacencyGraph::from_edges(rows * cols, edges).unwrap()
    }

    pub fn random(n: usize, p: f64, seed: u64) -> AdjacencyGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        AdjacencyGraph::from_edges(n, edges).unwrap()
    }

    pub fn random_tree(n: usize, seed: u64) -> AdjacencyGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        labels.shuffle(&mut rng);
        let edges = (1..n).map(|k| (labels[k], labels[rng.random_range(0..k)]));
        AdjacencyGraph::from_edges(n, edges.collect::<Vec<_>>()).unwrap()
    }
}
