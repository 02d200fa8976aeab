use std::cmp::Ordering;

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::argmax_votes;
use super::dataset::N_FEATURES;
use super::params::TreeParams;

/// Tree node. Every node keeps the class counts of the samples that reached it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        counts: Vec<usize>,
    },
    Leaf {
        counts: Vec<usize>,
    },
}

/// CART classification tree with Gini impurity. `x <= threshold` goes left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_classes: usize,
}

/// Split quality as the exact fraction `Σc_L²/n_L + Σc_R²/n_R`, stored as
/// `(numerator, denominator)`. Larger is purer; comparing exactly makes the
/// tie-breaking (lowest feature, then lowest threshold) deterministic.
#[derive(Clone, Copy)]
struct SplitScore {
    num: u128,
    den: u128,
}

impl SplitScore {
    fn new(sq_left: u128, n_left: u128, sq_right: u128, n_right: u128) -> Self {
        SplitScore {
            num: sq_left * n_right + sq_right * n_left,
            den: n_left * n_right,
        }
    }

    fn cmp(&self, other: &SplitScore) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: SplitScore,
}

impl DecisionTree {
    /// Fits on the rows listed in `samples` (repeats allowed, as in a
    /// bootstrap sample). `rng` is only consulted when `max_features`
    /// restricts the features tried per split.
    pub fn fit(
        x: &[[f64; N_FEATURES]],
        y: &[usize],
        n_classes: usize,
        samples: Vec<usize>,
        params: &TreeParams,
        rng: &mut ChaCha8Rng,
    ) -> DecisionTree {
        let mut nodes = Vec::new();
        // (node slot, samples, depth)
        let mut pending = vec![(0usize, samples, 0usize)];
        nodes.push(Node::Leaf { counts: Vec::new() });
        let mut scratch = Vec::new();

        while let Some((slot, samples, depth)) = pending.pop() {
            let counts = class_counts(y, &samples, n_classes);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_ok = params.max_depth.is_none_or(|d| depth < d);
            let split = if !pure && depth_ok && samples.len() >= params.min_samples_split {
                best_split(x, y, n_classes, &samples, params, rng, &mut scratch)
            } else {
                None
            };
            match split {
                None => nodes[slot] = Node::Leaf { counts },
                Some(c) => {
                    let (left, right): (Vec<usize>, Vec<usize>) =
                        samples.iter().partition(|&&i| x[i][c.feature] <= c.threshold);
                    let l = nodes.len();
                    nodes.push(Node::Leaf { counts: Vec::new() });
                    nodes.push(Node::Leaf { counts: Vec::new() });
                    nodes[slot] = Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left: l,
                        right: l + 1,
                        counts,
                    };
                    // right pushed first so the left subtree is built first
                    pending.push((l + 1, right, depth + 1));
                    pending.push((l, left, depth + 1));
                }
            }
        }
        DecisionTree { nodes, n_classes }
    }

    fn leaf_counts(&self, row: &[f64]) -> &[usize] {
        let mut k = 0;
        loop {
            match &self.nodes[k] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => k = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax_votes(self.leaf_counts(row))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], k: usize) -> usize {
            match &nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Structural sanity for trees read from disk: children point forward,
    /// counts have one entry per class, thresholds are finite.
    pub(crate) fn is_consistent(&self) -> bool {
        !self.nodes.is_empty()
            && self.nodes.iter().enumerate().all(|(k, node)| match node {
                Node::Leaf { counts } => counts.len() == self.n_classes && counts.iter().any(|&c| c > 0),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    counts,
                } => {
                    *feature < N_FEATURES
                        && threshold.is_finite()
                        && *left > k
                        && *right > k
                        && *left < self.nodes.len()
                        && *right < self.nodes.len()
                        && counts.len() == self.n_classes
                }
            })
    }
}

fn class_counts(y: &[usize], samples: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &i in samples {
        counts[y[i]] += 1;
    }
    counts
}

fn sum_sq(counts: &[usize]) -> u128 {
    counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

fn best_split(
    x: &[[f64; N_FEATURES]],
    y: &[usize],
    n_classes: usize,
    samples: &[usize],
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
    sorted: &mut Vec<usize>,
) -> Option<Candidate> {
    let features: Vec<usize> = match params.max_features {
        Some(m) if m < N_FEATURES => {
            let mut f = index::sample(rng, N_FEATURES, m).into_vec();
            f.sort_unstable();
            f
        }
        _ => (0..N_FEATURES).collect(),
    };

    let n = samples.len();
    let min_leaf = params.min_samples_leaf;
    let total = class_counts(y, samples, n_classes);
    let mut best: Option<Candidate> = None;

    for feature in features {
        sorted.clear();
        sorted.extend_from_slice(samples);
        sorted.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]).then(a.cmp(&b)));

        let mut left = vec![0usize; n_classes];
        for t in 1..n {
            left[y[sorted[t - 1]]] += 1;
            let lo = x[sorted[t - 1]][feature];
            let hi = x[sorted[t]][feature];
            if lo >= hi || t < min_leaf || n - t < min_leaf {
                continue;
            }
            let right: Vec<usize> = total.iter().zip(&left).map(|(a, b)| a - b).collect();
            let score = SplitScore::new(sum_sq(&left), t as u128, sum_sq(&right), (n - t) as u128);
            if best.as_ref().is_none_or(|b| score.cmp(&b.score) == Ordering::Greater) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi || !threshold.is_finite() {
                    threshold = lo;
                }
                best = Some(Candidate {
                    feature,
                    threshold,
                    score,
                });
            }
        }
    }
    best
}
