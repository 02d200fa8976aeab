use super::amd::minimum_degree_ordering;
use super::level::{min_degree_vertex, pseudo_peripheral, Bfs, Levels};
use super::{LeafOrdering, NdConfig};
use crate::matrix::{AdjacencyGraph, Permutation};

/// One dissection: `part_a` is numbered first, then `part_b`, then
/// `separator`. Vertex ids are original indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DissectionStep {
    pub part_a: Vec<usize>,
    pub part_b: Vec<usize>,
    pub separator: Vec<usize>,
}

/// Level-structure nested dissection.
///
/// A region at or below `leaf_threshold` vertices is ordered by
/// `cfg.leaf_ordering`. A larger region is split into connected components,
/// and each component larger than the threshold is cut at one level of a BFS
/// level structure rooted at a pseudo-peripheral vertex, the level with the
/// best ratio of separator size to the smaller side. Levels before the cut
/// form part A, levels after it part B, and cut-level vertices without a
/// neighbor in B also join A. A is numbered first, then B, then the separator.
pub fn nested_dissection_ordering(g: &AdjacencyGraph, cfg: &NdConfig) -> Permutation {
    nested_dissection_traced(g, cfg).0
}

/// Nested dissection with minimum-degree leaves.
pub fn hybrid_ordering(g: &AdjacencyGraph, cfg: &NdConfig) -> Permutation {
    let cfg = NdConfig {
        leaf_ordering: LeafOrdering::MinimumDegree,
        ..*cfg
    };
    nested_dissection_ordering(g, &cfg)
}

enum Task {
    Region(Vec<usize>),
    Emit(Vec<usize>),
}

/// [`nested_dissection_ordering`] plus the list of dissections performed,
/// in the order they were made.
///
/// # Panics
///
/// If `cfg.leaf_threshold < 2`.
pub fn nested_dissection_traced(g: &AdjacencyGraph, cfg: &NdConfig) -> (Permutation, Vec<DissectionStep>) {
    cfg.validate().expect("invalid nested dissection config");
    let n = g.n();
    // region[v] identifies the task currently owning v
    let mut region = vec![usize::MAX; n];
    let mut region_id = 0usize;
    let mut bfs = Bfs::new(n);
    let mut order = Vec::with_capacity(n);
    let mut trace = Vec::new();
    let mut local = vec![usize::MAX; n];
    let mut claimed = vec![usize::MAX; n];
    let mut level_of = vec![0usize; n];

    let mut stack = vec![Task::Region((0..n).collect())];
    while let Some(task) = stack.pop() {
        let vertices = match task {
            Task::Emit(vs) => {
                order.extend(vs);
                continue;
            }
            Task::Region(vs) => vs,
        };
        if vertices.is_empty() {
            continue;
        }
        if vertices.len() <= cfg.leaf_threshold {
            order_leaf(g, &vertices, cfg.leaf_ordering, &mut local, &mut order);
            continue;
        }

        region_id += 1;
        let id = region_id;
        for &v in &vertices {
            region[v] = id;
        }
        let inside = |v: usize| region[v] == id;
        let degree = |v: usize| g.neighbors(v).iter().filter(|&&u| region[u] == id).count();

        let mut components = Vec::new();
        for &v in &vertices {
            if claimed[v] == id {
                continue;
            }
            let comp = bfs.levels(g, v, inside).order;
            for &u in &comp {
                claimed[u] = id;
            }
            components.push(comp);
        }

        if components.len() > 1 {
            for comp in components.into_iter().rev() {
                let mut comp = comp;
                comp.sort_unstable();
                stack.push(Task::Region(comp));
            }
            continue;
        }

        let comp = &components[0];
        let start = min_degree_vertex(comp, degree);
        let (_, levels) = pseudo_peripheral(g, start, &mut bfs, inside, degree);
        let cut = separator_level(&levels);
        for k in 0..levels.depth() {
            for &v in levels.level(k) {
                level_of[v] = k;
            }
        }
        let mut part_a: Vec<usize> = (0..cut).flat_map(|k| levels.level(k).iter().copied()).collect();
        let mut part_b: Vec<usize> = (cut + 1..levels.depth())
            .flat_map(|k| levels.level(k).iter().copied())
            .collect();
        // cut-level vertices with no neighbor beyond the cut join A
        let mut separator = Vec::new();
        for &v in levels.level(cut) {
            if part_b.is_empty() || g.neighbors(v).iter().any(|&u| inside(u) && level_of[u] == cut + 1) {
                separator.push(v);
            } else {
                part_a.push(v);
            }
        }
        part_a.sort_unstable();
        part_b.sort_unstable();
        separator.sort_unstable();

        trace.push(DissectionStep {
            part_a: part_a.clone(),
            part_b: part_b.clone(),
            separator: separator.clone(),
        });
        stack.push(Task::Emit(separator));
        stack.push(Task::Region(part_b));
        stack.push(Task::Region(part_a));
    }

    let perm = Permutation::from_order(&order).expect("dissection numbers each vertex once");
    (perm, trace)
}

/// Level to cut at: the one minimizing `|separator| / min(|A|, |B|)`, with
/// ties to the level nearest the middle. Depths below three cut at the middle.
fn separator_level(levels: &Levels) -> usize {
    let depth = levels.depth();
    let mid = depth / 2;
    if depth < 3 {
        return mid;
    }
    let total = levels.order.len();
    let mut best = mid;
    let mut best_score = (usize::MAX, 1usize);
    for k in 1..depth - 1 {
        let sep = levels.level(k).len();
        let a = levels.offsets[k];
        let b = total - levels.offsets[k + 1];
        let score = (sep, a.min(b));
        // sep / small < best_sep / best_small, compared exactly
        let better = (score.0 as u128) * (best_score.1 as u128) < (best_score.0 as u128) * (score.1 as u128);
        let equal = (score.0 as u128) * (best_score.1 as u128) == (best_score.0 as u128) * (score.1 as u128);
        if better || (equal && k.abs_diff(mid) < best.abs_diff(mid)) {
            best = k;
            best_score = score;
        }
    }
    best
}

fn order_leaf(
    g: &AdjacencyGraph,
    vertices: &[usize],
    how: LeafOrdering,
    local: &mut [usize],
    order: &mut Vec<usize>,
) {
    match how {
        LeafOrdering::Natural => order.extend_from_slice(vertices),
        LeafOrdering::MinimumDegree => {
            for (k, &v) in vertices.iter().enumerate() {
                local[v] = k;
            }
            let edges = vertices.iter().enumerate().flat_map(|(k, &v)| {
                let local = &*local;
                g.neighbors(v)
                    .iter()
                    .filter_map(move |&u| (local[u] != usize::MAX && local[u] > k).then_some((k, local[u])))
            });
            let sub = AdjacencyGraph::from_edges(vertices.len(), edges.collect::<Vec<_>>())
                .expect("local indices in range");
            for &v in vertices {
                local[v] = usize::MAX;
            }
            order.extend(minimum_degree_ordering(&sub).order().into_iter().map(|k| vertices[k]));
        }
    }
}
