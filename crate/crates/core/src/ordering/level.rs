use crate::matrix::AdjacencyGraph;

/// Sweeps allowed when searching for a pseudo-peripheral vertex.
pub(crate) const MAX_SWEEPS: usize = 10;

/// Breadth-first level structure: `order[offsets[k]..offsets[k + 1]]` is level `k`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Levels {
    pub order: Vec<usize>,
    pub offsets: Vec<usize>,
}

impl Levels {
    pub fn depth(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn level(&self, k: usize) -> &[usize] {
        &self.order[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn last(&self) -> &[usize] {
        self.level(self.depth() - 1)
    }
}

/// Reusable BFS workspace restricted to a vertex region.
pub(crate) struct Bfs {
    stamp: Vec<u32>,
    generation: u32,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs {
            stamp: vec![0; n],
            generation: 0,
        }
    }

    fn next_generation(&mut self) -> u32 {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        self.generation
    }

    /// Level structure rooted at `root`, visiting only vertices accepted by `allowed`.
    pub fn levels(
        &mut self,
        g: &AdjacencyGraph,
        root: usize,
        allowed: impl Fn(usize) -> bool,
    ) -> Levels {
        let gen = self.next_generation();
        let mut order = vec![root];
        let mut offsets = vec![0, 1];
        self.stamp[root] = gen;
        let mut start = 0;
        while start < order.len() {
            let end = order.len();
            for k in start..end {
                let v = order[k];
                for &u in g.neighbors(v) {
                    if self.stamp[u] != gen && allowed(u) {
                        self.stamp[u] = gen;
                        order.push(u);
                    }
                }
            }
            if order.len() > end {
                offsets.push(order.len());
            }
            start = end;
        }
        Levels { order, offsets }
    }
}

/// Lowest-index vertex of minimum `degree` among `candidates`.
pub(crate) fn min_degree_vertex(candidates: &[usize], degree: impl Fn(usize) -> usize) -> usize {
    *candidates
        .iter()
        .min_by_key(|&&v| (degree(v), v))
        .expect("non-empty candidate set")
}

/// George–Liu search within one region: BFS from `start`, jump to the
/// minimum-degree vertex of the last level, and repeat while the number of
/// levels grows (at most [`MAX_SWEEPS`] sweeps).
pub(crate) fn pseudo_peripheral(
    g: &AdjacencyGraph,
    start: usize,
    bfs: &mut Bfs,
    allowed: impl Fn(usize) -> bool + Copy,
    degree: impl Fn(usize) -> usize + Copy,
) -> (usize, Levels) {
    let mut root = start;
    let mut levels = bfs.levels(g, root, allowed);
    for _ in 1..MAX_SWEEPS {
        let candidate = min_degree_vertex(levels.last(), degree);
        let trial = bfs.levels(g, candidate, allowed);
        if trial.depth() > levels.depth() {
            root = candidate;
            levels = trial;
        } else {
            break;
        }
    }
    (root, levels)
}

/// Pseudo-peripheral vertex of the component containing `start`, together
/// with its eccentricity (number of levels minus one).
pub fn pseudo_peripheral_vertex(g: &AdjacencyGraph, start: usize) -> (usize, usize) {
    let mut bfs = Bfs::new(g.n());
    let (root, levels) = pseudo_peripheral(g, start, &mut bfs, |_| true, |v| g.degree(v));
    (root, levels.depth() - 1)
}
