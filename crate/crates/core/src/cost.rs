//! Symbolic Cholesky cost of an ordering, and labels derived from it.
//!
//! Two independent routes compute the same [`CostReport`]: the elimination
//! game (explicit graph simulation, quadratic memory, for small inputs and
//! tests) and elimination-tree row-subtree traversal (linear in the size of
//! the factor, used everywhere else).

use std::collections::BTreeSet;
use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{AdjacencyGraph, CsrMatrix, Permutation};
use crate::ordering::{order_graph, OrderingLabel};

/// Factor size and work for one ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostReport {
    /// Entries of `L` absent from the lower triangle of the permuted matrix.
    pub fill_in: u64,
    /// Entries of `L`, diagonal included.
    pub factor_nnz: u64,
    /// `Σ c_j²` over the column counts `c_j` of `L`.
    pub flops: u64,
}

/// Elimination tree of a permuted pattern, in the permuted numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTree {
    /// `parent[j]` is the smallest `i > j` with `L[i][j] != 0`, or `None` for a root.
    pub parent: Vec<Option<usize>>,
    pub postorder: Vec<usize>,
}

impl EliminationTree {
    /// Liu's algorithm with path compression over the lower triangle of the
    /// graph relabelled by `p`.
    pub fn build(g: &AdjacencyGraph, p: &Permutation) -> Result<Self> {
        let lower = permuted_lower(g, p)?;
        let n = g.n();
        let mut parent = vec![None; n];
        let mut ancestor: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            for &k in &lower[i] {
                let mut j = k;
                while let Some(next) = ancestor[j] {
                    if next == i {
                        break;
                    }
                    ancestor[j] = Some(i);
                    j = next;
                }
                if ancestor[j].is_none() {
                    ancestor[j] = Some(i);
                    parent[j] = Some(i);
                }
            }
        }
        let postorder = postorder(&parent);
        Ok(EliminationTree { parent, postorder })
    }
}

fn postorder(parent: &[Option<usize>]) -> Vec<usize> {
    let n = parent.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (j, p) in parent.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(j),
            None => roots.push(j),
        }
    }
    let mut post = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in roots {
        stack.push((root, 0));
        while let Some((v, k)) = stack.pop() {
            if k < children[v].len() {
                stack.push((v, k + 1));
                stack.push((children[v][k], 0));
            } else {
                post.push(v);
            }
        }
    }
    post
}

/// Row `i` holds the permuted column indices `j < i` of the lower triangle.
fn permuted_lower(g: &AdjacencyGraph, p: &Permutation) -> Result<Vec<Vec<usize>>> {
    if p.len() != g.n() {
        return Err(Error::dims(
            format!("permutation of size {}", g.n()),
            format!("size {}", p.len()),
        ));
    }
    let mut lower = vec![Vec::new(); g.n()];
    for (u, v) in g.edges() {
        let (a, b) = (p.get(u), p.get(v));
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        lower[hi].push(lo);
    }
    for row in &mut lower {
        row.sort_unstable();
    }
    Ok(lower)
}

fn report_from_counts(counts: impl Iterator<Item = u64>, n_edges: usize, n: usize) -> CostReport {
    let (mut factor_nnz, mut flops) = (0u64, 0u64);
    for c in counts {
        factor_nnz += c;
        flops += c * c;
    }
    CostReport {
        fill_in: factor_nnz - n as u64 - n_edges as u64,
        factor_nnz,
        flops,
    }
}

/// Simulates symmetric elimination in the order given by `p`: eliminating a
/// vertex joins all of its uneliminated neighbors pairwise.
///
/// Memory grows with the fill, so keep this to a few hundred vertices.
pub fn elimination_game_fill(g: &AdjacencyGraph, p: &Permutation) -> Result<CostReport> {
    let n = g.n();
    if p.len() != n {
        return Err(Error::dims(
            format!("permutation of size {n}"),
            format!("size {}", p.len()),
        ));
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut eliminated = vec![false; n];
    let mut counts = Vec::with_capacity(n);
    for v in p.order() {
        eliminated[v] = true;
        let remaining: Vec<usize> = adj[v].iter().copied().filter(|&u| !eliminated[u]).collect();
        counts.push(1 + remaining.len() as u64);
        for (k, &a) in remaining.iter().enumerate() {
            for &b in &remaining[k + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
    }
    Ok(report_from_counts(counts.into_iter(), g.n_edges(), n))
}

/// Exact column counts of `L` via row subtrees of the elimination tree.
///
/// Row `i` of `L` is the union of etree paths from each `k < i` in row `i`
/// of the permuted lower triangle up towards `i`; each node reached adds one
/// to its column count.
pub fn etree_column_counts(g: &AdjacencyGraph, p: &Permutation) -> Result<CostReport> {
    let lower = permuted_lower(g, p)?;
    let tree = EliminationTree::build(g, p)?;
    let n = g.n();
    let mut counts = vec![1u64; n];
    let mut mark = vec![usize::MAX; n];
    for i in 0..n {
        mark[i] = i;
        for &k in &lower[i] {
            let mut j = k;
            while mark[j] != i {
                mark[j] = i;
                counts[j] += 1;
                j = tree.parent[j].expect("path from a lower entry reaches its row");
            }
        }
    }
    Ok(report_from_counts(counts.into_iter(), g.n_edges(), n))
}

/// Cost of all four orderings, in [`OrderingLabel::ALL`] order.
pub fn evaluate_orderings(g: &AdjacencyGraph) -> Vec<(OrderingLabel, CostReport)> {
    OrderingLabel::ALL
        .par_iter()
        .map(|&label| {
            let p = order_graph(g, label);
            let cost = etree_column_counts(g, &p).expect("ordering matches graph size");
            (label, cost)
        })
        .collect()
}

/// First label in [`OrderingLabel::PRECEDENCE`] order attaining the minimum score.
pub fn argmin_by_precedence<T: PartialOrd + Copy>(score: impl Fn(OrderingLabel) -> T) -> OrderingLabel {
    let mut best = OrderingLabel::PRECEDENCE[0];
    let mut best_score = score(best);
    for &label in &OrderingLabel::PRECEDENCE[1..] {
        let s = score(label);
        if s < best_score {
            best = label;
            best_score = s;
        }
    }
    best
}

/// Label with the smallest flop estimate among the four orderings.
pub fn proxy_label(m: &CsrMatrix) -> Result<OrderingLabel> {
    let g = m.symmetrize()?;
    Ok(proxy_label_with_costs(&g).0)
}

/// [`proxy_label`] on a graph, also returning every ordering's cost.
pub fn proxy_label_with_costs(g: &AdjacencyGraph) -> (OrderingLabel, Vec<(OrderingLabel, CostReport)>) {
    let costs = evaluate_orderings(g);
    let label = argmin_by_precedence(|l| costs[l.index()].1.flops);
    (label, costs)
}

/// Measured solve times for one matrix. The hybrid slot holds the SCOTCH time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub matrix: String,
    pub rcm: Option<f64>,
    pub amd: Option<f64>,
    pub nd: Option<f64>,
    pub hybrid: Option<f64>,
}

impl TimingRecord {
    pub fn new(matrix: impl Into<String>, rcm: f64, amd: f64, nd: f64, hybrid: f64) -> Self {
        TimingRecord {
            matrix: matrix.into(),
            rcm: Some(rcm),
            amd: Some(amd),
            nd: Some(nd),
            hybrid: Some(hybrid),
        }
    }

    pub fn time(&self, label: OrderingLabel) -> Option<f64> {
        match label {
            OrderingLabel::Rcm => self.rcm,
            OrderingLabel::Amd => self.amd,
            OrderingLabel::Nd => self.nd,
            OrderingLabel::Hybrid => self.hybrid,
        }
    }

    /// All four times, or the first missing (or non-positive) one as an error.
    pub fn times(&self) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for label in OrderingLabel::ALL {
            match self.time(label) {
                Some(t) if t > 0.0 && t.is_finite() => out[label.index()] = t,
                _ => {
                    return Err(Error::IncompleteRecord {
                        matrix: self.matrix.clone(),
                        missing: label.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }
}

/// Label with the shortest measured time.
pub fn label_from_timings(rec: &TimingRecord) -> Result<OrderingLabel> {
    let times = rec.times()?;
    Ok(argmin_by_precedence(|l| times[l.index()]))
}

#[derive(Debug, Deserialize)]
struct TimingRow {
    matrix: String,
    rcm: Option<f64>,
    amd: Option<f64>,
    nd: Option<f64>,
    scotch: Option<f64>,
}

/// Reads the `matrix,rcm,amd,nd,scotch` timing CSV. Empty cells load as
/// missing times; [`label_from_timings`] reports them.
pub fn read_timings(reader: impl Read) -> Result<Vec<TimingRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for want in ["matrix", "rcm", "amd", "nd", "scotch"] {
        if !headers.iter().any(|h| h.eq_ignore_ascii_case(want)) {
            return Err(Error::InvalidDataset(format!("timing CSV lacks a `{want}` column")));
        }
    }
    let lowered: csv::StringRecord = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    rdr.set_headers(lowered);
    rdr.deserialize::<TimingRow>()
        .map(|row| {
            let row = row?;
            Ok(TimingRecord {
                matrix: row.matrix,
                rcm: row.rcm,
                amd: row.amd,
                nd: row.nd,
                hybrid: row.scotch,
            })
        })
        .collect()
}
