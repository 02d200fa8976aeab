use super::level::{min_degree_vertex, pseudo_peripheral, Bfs};
use crate::matrix::{AdjacencyGraph, Permutation};

/// Reverse Cuthill-McKee.
///
/// Components are taken in order of their lowest vertex. Each is numbered
/// breadth-first from a pseudo-peripheral vertex, visiting unnumbered
/// neighbors by ascending degree, and that numbering is reversed in place,
/// so components keep their relative order and isolated vertices keep
/// their natural position.
pub fn rcm_ordering(g: &AdjacencyGraph) -> Permutation {
    let n = g.n();
    let degree = |v: usize| g.degree(v);
    let mut bfs = Bfs::new(n);
    let mut numbered = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut neighbors = Vec::new();

    for seed in 0..n {
        if numbered[seed] {
            continue;
        }
        let component = bfs.levels(g, seed, |_| true).order;
        let start = min_degree_vertex(&component, degree);
        let (root, _) = pseudo_peripheral(g, start, &mut bfs, |_| true, degree);

        let head = order.len();
        order.push(root);
        numbered[root] = true;
        let mut cursor = head;
        while cursor < order.len() {
            let v = order[cursor];
            cursor += 1;
            neighbors.clear();
            neighbors.extend(g.neighbors(v).iter().copied().filter(|&u| !numbered[u]));
            neighbors.sort_unstable_by_key(|&u| (g.degree(u), u));
            for &u in &neighbors {
                numbered[u] = true;
                order.push(u);
            }
        }
        order[head..].reverse();
    }

    Permutation::from_order(&order).expect("BFS visits every vertex once")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::bandwidth;
    use crate::matrix::CsrMatrix;
    use crate::ordering::test_graphs::*;

    fn bw_after(g: &AdjacencyGraph, p: &Permutation) -> usize {
        bandwidth(&g.to_matrix().permute(p).unwrap()).unwrap()
    }

    /// Smallest bandwidth over every labeling of `g` (n! candidates).
    fn brute_min_bandwidth(g: &AdjacencyGraph) -> usize {
        fn rec(g: &AdjacencyGraph, pos: &mut Vec<usize>, used: &mut Vec<bool>, k: usize, best: &mut usize) {
            let n = g.n();
            if k == n {
                let bw = g.edges().map(|(u, v)| pos[u].abs_diff(pos[v])).max().unwrap_or(0);
                *best = (*best).min(bw);
                return;
            }
            for slot in 0..n {
                if !used[slot] {
                    used[slot] = true;
                    pos[k] = slot;
                    rec(g, pos, used, k + 1, best);
                    used[slot] = false;
                }
            }
        }
        let n = g.n();
        let mut best = usize::MAX;
        rec(g, &mut vec![0; n], &mut vec![false; n], 0, &mut best);
        best
    }

    #[test]
    fn path_stays_optimal() {
        let g = path(3);
        assert_eq!(bw_after(&g, &rcm_ordering(&g)), 1);
    }

    #[test]
    fn shuffled_path_of_seven_reaches_brute_force_optimum() {
        let shuffle = Permutation::new(vec![3, 6, 0, 5, 1, 4, 2]).unwrap();
        let g = path(7).permute(&shuffle).unwrap();
        assert_eq!(brute_min_bandwidth(&g), 1);
        assert!(bandwidth(&g.to_matrix()).unwrap() > 1);
        assert_eq!(bw_after(&g, &rcm_ordering(&g)), 1);
    }

    #[test]
    fn star_bandwidth_against_brute_force() {
        let g = star(4);
        assert_eq!(brute_min_bandwidth(&g), 2);
        // BFS numbering puts the hub within the first two slots, so the
        // reversed numbering cannot centre it: 3 is the best RCM can do.
        assert_eq!(bw_after(&g, &rcm_ordering(&g)), 3);
    }

    #[test]
    fn handles_empty_and_isolated() {
        assert_eq!(rcm_ordering(&AdjacencyGraph::empty(0)).len(), 0);
        let g = AdjacencyGraph::empty(4);
        assert_eq!(rcm_ordering(&g), Permutation::identity(4));
    }

    #[test]
    fn shuffled_banded_matrices_improve() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut improved = 0;
        let cases = 50;
        for _ in 0..cases {
            let n = rng.random_range(10..=300);
            let band = rng.random_range(1..=5);
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (1..=band).filter(move |d| i + d < n).map(move |d| (i, i + d)))
                .collect();
            let mut labels: Vec<usize> = (0..n).collect();
            labels.shuffle(&mut rng);
            let g = AdjacencyGraph::from_edges(n, edges.iter().map(|&(u, v)| (labels[u], labels[v])))
                .unwrap();
            let before = bandwidth(&g.to_matrix()).unwrap();
            let after = bw_after(&g, &rcm_ordering(&g));
            assert!(after < n);
            if after <= before {
                improved += 1;
            }
        }
        assert!(improved * 10 >= cases * 9, "{improved}/{cases}");
    }

    #[test]
    fn disconnected_components_are_contiguous() {
        let g = AdjacencyGraph::from_edges(6, [(0, 3), (3, 5), (1, 2), (2, 4)]).unwrap();
        let p = rcm_ordering(&g);
        let m: CsrMatrix = g.to_matrix().permute(&p).unwrap();
        assert_eq!(bandwidth(&m).unwrap(), 1);
    }
}
