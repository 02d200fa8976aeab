//! Compressed sparse row storage, permutations, and adjacency graphs.
//!
//! Indices are 0-based throughout. Stored entries define the pattern: an
//! explicit zero is still a stored entry and counts toward `nnz`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse matrix in compressed sparse row layout.
///
/// Column indices are strictly increasing within each row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n_rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n_rows + 1
            )));
        }
        if row_ptr[0] != 0 || row_ptr[n_rows] != col_idx.len() {
            return Err(Error::InvalidMatrix(
                "row_ptr must start at 0 and end at nnz".into(),
            ));
        }
        if col_idx.len() != values.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} column indices but {} values",
                col_idx.len(),
                values.len()
            )));
        }
        for row in 0..n_rows {
            let (start, end) = (row_ptr[row], row_ptr[row + 1]);
            if start > end {
                return Err(Error::InvalidMatrix(format!(
                    "row_ptr decreases at row {row}"
                )));
            }
            let cols = &col_idx[start..end];
            if cols.iter().any(|&c| c >= n_cols) {
                return Err(Error::InvalidMatrix(format!(
                    "column index out of range in row {row}"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "columns of row {row} are not strictly increasing"
                )));
            }
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles a matrix from `(row, col, value)` triplets in any order.
    /// Duplicate coordinates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= n_rows || c >= n_cols) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({r}, {c}) outside a {n_rows}x{n_cols} matrix"
            )));
        }
        entries.sort_by_key(|e| (e.0, e.1));

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Square matrix with the given pattern and every value set to 1.0.
    pub fn from_pattern(n: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pattern: Vec<(usize, usize)> = entries.into_iter().collect();
        pattern.sort_unstable();
        pattern.dedup();
        Self::from_triplets(n, n, pattern.into_iter().map(|(r, c)| (r, c, 1.0)))
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored entries, explicit zeros included.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_cols(&self, row: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    pub fn row_values(&self, row: usize) -> &[f64] {
        &self.values[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            self.row_cols(r)
                .iter()
                .zip(self.row_values(r))
                .map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let cols = self.row_cols(row);
        cols.binary_search(&col)
            .ok()
            .map(|k| self.row_values(row)[k])
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::dims(
                "square matrix",
                format!("{}x{}", self.n_rows, self.n_cols),
            ))
        }
    }

    /// Symmetric permutation `P A Pᵀ`: entry `(i, j)` moves to `(p[i], p[j])`.
    pub fn permute(&self, p: &Permutation) -> Result<CsrMatrix> {
        self.require_square()?;
        if p.len() != self.n_rows {
            return Err(Error::dims(
                format!("permutation of size {}", self.n_rows),
                format!("size {}", p.len()),
            ));
        }
        let inv = p.inverse();
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        let mut row_buf: Vec<(usize, f64)> = Vec::new();
        for new_row in 0..self.n_rows {
            let old_row = inv.get(new_row);
            row_buf.clear();
            row_buf.extend(
                self.row_cols(old_row)
                    .iter()
                    .zip(self.row_values(old_row))
                    .map(|(&c, &v)| (p.get(c), v)),
            );
            row_buf.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in &row_buf {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Pattern of `A + Aᵀ` without the diagonal.
    pub fn symmetrize(&self) -> Result<AdjacencyGraph> {
        self.require_square()?;
        let n = self.n_rows;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (r, c, _) in self.iter() {
            if r != c {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(AdjacencyGraph { adj })
    }
}

/// Free-function form of [`CsrMatrix::symmetrize`].
pub fn symmetrize(m: &CsrMatrix) -> Result<AdjacencyGraph> {
    m.symmetrize()
}

/// Free-function form of [`CsrMatrix::permute`].
pub fn apply_permutation(m: &CsrMatrix, p: &Permutation) -> Result<CsrMatrix> {
    m.permute(p)
}

/// Free-function form of [`Permutation::inverse`].
pub fn invert_permutation(p: &Permutation) -> Permutation {
    p.inverse()
}

/// A bijection on `0..n` stored as `perm[old] = new`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    perm: Vec<usize>,
}

impl Permutation {
    /// Validates that `perm` is a bijection on `0..perm.len()`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n {
                return Err(Error::InvalidPermutation(format!(
                    "perm[{old}] = {new} is out of range for size {n}"
                )));
            }
            if std::mem::replace(&mut seen[new], true) {
                return Err(Error::InvalidPermutation(format!(
                    "value {new} appears more than once"
                )));
            }
        }
        Ok(Permutation { perm })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            perm: (0..n).collect(),
        }
    }

    /// Builds the permutation from an elimination sequence, where `order[k]`
    /// is the old index placed at position `k`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let mut perm = vec![usize::MAX; order.len()];
        for (new, &old) in order.iter().enumerate() {
            if old >= order.len() || perm[old] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "order entry {old} at position {new} is invalid or repeated"
                )));
            }
            perm[old] = new;
        }
        Ok(Permutation { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// New position of `old`.
    pub fn get(&self, old: usize) -> usize {
        self.perm[old]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.perm
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.perm.len()];
        for (old, &new) in self.perm.iter().enumerate() {
            inv[new] = old;
        }
        Permutation { perm: inv }
    }

    /// Old indices listed in new order (the elimination sequence).
    pub fn order(&self) -> Vec<usize> {
        self.inverse().perm
    }

    /// Applies `self` first, then `next`: `result[i] = next[self[i]]`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation {
            perm: self.perm.iter().map(|&k| next.perm[k]).collect(),
        }
    }
}

/// Undirected simple graph with sorted neighbor lists and no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyGraph {
    adj: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    /// Builds a graph from an edge list. Self-loops are dropped and
    /// duplicate edges merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidMatrix(format!(
                    "edge ({u}, {v}) outside a graph with {n} vertices"
                )));
            }
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(AdjacencyGraph { adj })
    }

    pub fn empty(n: usize) -> Self {
        AdjacencyGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Relabels vertex `v` as `p[v]`.
    pub fn permute(&self, p: &Permutation) -> Result<AdjacencyGraph> {
        if p.len() != self.n() {
            return Err(Error::dims(
                format!("permutation of size {}", self.n()),
                format!("size {}", p.len()),
            ));
        }
        let mut adj = vec![Vec::new(); self.n()];
        for (v, list) in self.adj.iter().enumerate() {
            let mut mapped: Vec<usize> = list.iter().map(|&u| p.get(u)).collect();
            mapped.sort_unstable();
            adj[p.get(v)] = mapped;
        }
        Ok(AdjacencyGraph { adj })
    }

    /// Subgraph induced by `vertices` (which must be sorted ascending and
    /// distinct). Local vertex `k` corresponds to `vertices[k]`, so local
    /// index order agrees with original index order.
    pub fn induced(&self, vertices: &[usize]) -> AdjacencyGraph {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut local = vec![usize::MAX; self.n()];
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|&u| (local[u] != usize::MAX).then_some(local[u]))
                    .collect()
            })
            .collect();
        AdjacencyGraph { adj }
    }

    /// Connected components, each sorted ascending, listed by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        let mut stack = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            stack.push(root);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Structural pattern `A + Aᵀ + I` as a matrix with unit values.
    pub fn to_matrix(&self) -> CsrMatrix {
        let n = self.n();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for v in 0..n {
            let mut inserted = false;
            for &u in &self.adj[v] {
                if !inserted && u > v {
                    col_idx.push(v);
                    inserted = true;
                }
                col_idx.push(u);
            }
            if !inserted {
                col_idx.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        let values = vec![1.0; col_idx.len()];
        CsrMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr,
            col_idx,
            values,
        }
    }

    #[cfg(test)]
    pub(crate) fn is_valid(&self) -> bool {
        self.adj.iter().enumerate().all(|(v, list)| {
            list.windows(2).all(|w| w[0] < w[1])
                && list
                    .iter()
                    .all(|&u| u != v && u < self.n() && self.adj[u].binary_search(&v).is_ok())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tridiagonal(n: usize) -> CsrMatrix {
        let mut e = Vec::new();
        for i in 0..n {
            e.push((i, i));
            if i + 1 < n {
                e.push((i, i + 1));
                e.push((i + 1, i));
            }
        }
        CsrMatrix::from_pattern(n, e).unwrap()
    }

    fn edge_set(g: &AdjacencyGraph) -> Vec<(usize, usize)> {
        g.edges().collect()
    }

    #[test]
    fn symmetrize_tridiagonal_is_path() {
        let g = tridiagonal(3).symmetrize().unwrap();
        assert_eq!(edge_set(&g), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn symmetrize_upper_triangle_closes() {
        let m = CsrMatrix::from_pattern(3, [(0, 1), (0, 2)]).unwrap();
        let g = m.symmetrize().unwrap();
        assert_eq!(edge_set(&g), vec![(0, 1), (0, 2)]);
        assert!(g.is_valid());
    }

    #[test]
    fn symmetrize_identity_has_no_edges() {
        let g = CsrMatrix::identity(4).symmetrize().unwrap();
        assert_eq!(g.n_edges(), 0);
        assert_eq!(g.n(), 4);
    }

    #[test]
    fn symmetrize_rejects_rectangular() {
        let m = CsrMatrix::from_triplets(2, 3, [(0, 2, 1.0)]).unwrap();
        assert!(matches!(m.symmetrize(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn identity_permutation_is_noop() {
        let m = tridiagonal(5);
        assert_eq!(m.permute(&Permutation::identity(5)).unwrap(), m);
    }

    #[test]
    fn reversal_keeps_tridiagonal() {
        let m = tridiagonal(3);
        let p = Permutation::new(vec![2, 1, 0]).unwrap();
        let pm = m.permute(&p).unwrap();
        assert_eq!(pm, m);
    }

    #[test]
    fn swap_relabels_entry() {
        let m = CsrMatrix::from_pattern(2, [(0, 1)]).unwrap();
        let pm = m.permute(&Permutation::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(pm.iter().map(|(r, c, _)| (r, c)).collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn permute_size_mismatch() {
        let m = tridiagonal(3);
        let err = m.permute(&Permutation::identity(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn invert_examples() {
        let inv = |v: Vec<usize>| Permutation::new(v).unwrap().inverse().into_vec();
        assert_eq!(inv(vec![0, 1, 2]), vec![0, 1, 2]);
        assert_eq!(inv(vec![2, 0, 1]), vec![1, 2, 0]);
        assert_eq!(inv(vec![1, 0]), vec![1, 0]);
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::from_order(&[1, 1]).is_err());
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, [(1, 1, 2.0), (0, 0, 1.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 1), Some(5.0));
    }

    #[test]
    fn explicit_zero_is_stored() {
        let m = CsrMatrix::from_triplets(2, 2, [(0, 1, 0.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.symmetrize().unwrap().n_edges(), 1);
    }

    #[test]
    fn new_validates_invariants() {
        assert!(CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 1.0]).is_ok());
        assert!(CsrMatrix::new(2, 2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 2], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = CsrMatrix> {
        (1usize..30).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, -10.0f64..10.0), 0..(3 * n))
                .prop_map(move |t| CsrMatrix::from_triplets(n, n, t).unwrap())
        })
    }

    fn arb_matrix_and_perm() -> impl Strategy<Value = (CsrMatrix, Permutation)> {
        arb_matrix().prop_flat_map(|m| {
            let n = m.n_rows();
            (Just(m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
                .prop_map(|(m, p)| (m, Permutation::new(p).unwrap()))
        })
    }

    proptest! {
        #[test]
        fn permutation_preserves_nnz_and_values((m, p) in arb_matrix_and_perm()) {
            let pm = m.permute(&p).unwrap();
            prop_assert_eq!(pm.nnz(), m.nnz());
            let mut a: Vec<u64> = m.values().iter().map(|v| v.to_bits()).collect();
            let mut b: Vec<u64> = pm.values().iter().map(|v| v.to_bits()).collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            for (r, c, v) in m.iter() {
                prop_assert_eq!(pm.get(p.get(r), p.get(c)), Some(v));
            }
        }

        #[test]
        fn permute_then_inverse_roundtrips((m, p) in arb_matrix_and_perm()) {
            let back = m.permute(&p).unwrap().permute(&p.inverse()).unwrap();
            prop_assert_eq!(back, m);
            prop_assert_eq!(p.inverse().inverse(), p);
        }

        #[test]
        fn symmetrize_is_symmetric_without_loops(m in arb_matrix()) {
            let g = m.symmetrize().unwrap();
            prop_assert!(g.is_valid());
            for (r, c, _) in m.iter() {
                if r != c {
                    prop_assert!(g.neighbors(r).contains(&c));
                }
            }
        }
    }
}
