use std::collections::BTreeSet;

use crate::matrix::{AdjacencyGraph, Permutation};

/// Minimum degree ordering on the quotient graph, with approximate external
/// degrees and element absorption.
///
/// Eliminated vertices become elements. Each live variable `i` keeps its
/// remaining variable neighbors `A[i]` and adjacent elements `E[i]`; each
/// element `e` keeps its live variables `L[e]`. After eliminating pivot `p`
/// every `i` in `L[p]` gets the bound
///
/// ```text
/// d(i) = min( live - 1,
///             d_old(i) + |L[p] \ i|,
///             |A[i]| + |L[p] \ i| + Σ_{e ∈ E[i], e ≠ p} |L[e] \ L[p]| )
/// ```
///
/// Ties in degree go to the lowest vertex index. Supervariable detection is
/// not performed.
pub fn minimum_degree_ordering(g: &AdjacencyGraph) -> Permutation {
    let n = g.n();
    let mut vars: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let mut elems_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut live = vec![true; n];
    let mut elem_live = vec![false; n];
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();

    // stamps: membership in the current pivot's element, and |L[e] \ L[p]|
    let mut in_pivot = vec![usize::MAX; n];
    let mut outside: Vec<Option<usize>> = vec![None; n];
    let mut touched: Vec<usize> = Vec::new();

    let mut order = Vec::with_capacity(n);
    let mut remaining = n;

    while let Some((_, p)) = queue.pop_first() {
        order.push(p);
        live[p] = false;
        remaining -= 1;

        let mut pivot_set = Vec::new();
        for &j in &vars[p] {
            if live[j] && in_pivot[j] != p {
                in_pivot[j] = p;
                pivot_set.push(j);
            }
        }
        for e in std::mem::take(&mut elems_of[p]) {
            for &j in &members[e] {
                if live[j] && in_pivot[j] != p {
                    in_pivot[j] = p;
                    pivot_set.push(j);
                }
            }
            elem_live[e] = false;
            members[e] = Vec::new();
        }
        vars[p] = Vec::new();
        pivot_set.sort_unstable();

        for &i in &pivot_set {
            vars[i].retain(|&j| live[j] && in_pivot[j] != p);
            elems_of[i].retain(|&e| elem_live[e]);
        }

        // |L[e] \ L[p]| for every element next to the pivot set
        for &i in &pivot_set {
            for &e in &elems_of[i] {
                let w = outside[e].get_or_insert_with(|| {
                    touched.push(e);
                    members[e].len()
                });
                *w -= 1;
            }
        }
        // aggressive absorption: elements wholly inside L[p] merge into p
        for &e in &touched {
            if outside[e] == Some(0) {
                elem_live[e] = false;
                members[e] = Vec::new();
            }
        }

        let others = pivot_set.len().saturating_sub(1);
        for &i in &pivot_set {
            elems_of[i].retain(|&e| elem_live[e]);
            let external: usize = vars[i].len()
                + others
                + elems_of[i]
                    .iter()
                    .map(|&e| outside[e].unwrap_or(members[e].len()))
                    .sum::<usize>();
            elems_of[i].push(p);
            let new_degree = external
                .min(degree[i] + others)
                .min(remaining.saturating_sub(1));
            queue.remove(&(degree[i], i));
            degree[i] = new_degree;
            queue.insert((new_degree, i));
        }

        for e in touched.drain(..) {
            outside[e] = None;
        }
        elem_live[p] = true;
        members[p] = pivot_set;
    }

    Permutation::from_order(&order).expect("each vertex eliminated once")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::elimination_game_fill;
    use crate::ordering::test_graphs::*;

    #[test]
    fn star_eliminates_a_leaf_first() {
        let g = star(4);
        let p = minimum_degree_ordering(&g);
        assert_ne!(p.order()[0], 0);
        assert_eq!(elimination_game_fill(&g, &p).unwrap().fill_in, 0);
    }

    #[test]
    fn grid_beats_natural_order() {
        let g = grid(7, 7);
        let md = elimination_game_fill(&g, &minimum_degree_ordering(&g)).unwrap();
        let natural = elimination_game_fill(&g, &Permutation::identity(49)).unwrap();
        assert!(md.fill_in < natural.fill_in, "{} vs {}", md.fill_in, natural.fill_in);
    }

    #[test]
    fn forests_have_no_fill() {
        for seed in 0..40 {
            let g = random_tree(1 + seed as usize * 5, seed);
            let p = minimum_degree_ordering(&g);
            assert_eq!(elimination_game_fill(&g, &p).unwrap().fill_in, 0, "seed {seed}");
        }
        let forest = AdjacencyGraph::from_edges(7, [(0, 4), (4, 6), (1, 2)]).unwrap();
        let p = minimum_degree_ordering(&forest);
        assert_eq!(elimination_game_fill(&forest, &p).unwrap().fill_in, 0);
    }

    #[test]
    fn clique_and_empty() {
        let clique = AdjacencyGraph::from_edges(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))))
            .unwrap();
        assert_eq!(minimum_degree_ordering(&clique), Permutation::identity(5));
        assert_eq!(minimum_degree_ordering(&AdjacencyGraph::empty(3)), Permutation::identity(3));
        assert_eq!(minimum_degree_ordering(&AdjacencyGraph::empty(0)).len(), 0);
    }

    #[test]
    fn random_graphs_do_not_lose_to_natural_much() {
        // loose sanity bound: greedy minimum degree should never be
        // dramatically worse than the natural order on sparse random graphs
        for seed in 0..20 {
            let g = random(80, 0.05, seed);
            let md = elimination_game_fill(&g, &minimum_degree_ordering(&g)).unwrap();
            let nat = elimination_game_fill(&g, &Permutation::identity(80)).unwrap();
            assert!(md.fill_in <= nat.fill_in, "seed {seed}: {} > {}", md.fill_in, nat.fill_in);
        }
    }
}
