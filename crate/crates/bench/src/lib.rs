//! Shared fixtures for the benchmarks.

use reorder_core::synth::{grid2d, grid3d, laplacian_like, synthetic_corpus, CorpusConfig, Family};
use reorder_core::{AdjacencyGraph, CsrMatrix};

/// Named graphs of a few thousand vertices covering the main structural regimes.
pub fn graphs() -> Vec<(&'static str, AdjacencyGraph)> {
    let random = corpus_of(Family::RandomSparse, 3000);
    vec![
        ("grid2d_60x60", grid2d(60, 60, false)),
        ("grid3d_15", grid3d(15, 15, 15)),
        ("random_3000", random.symmetrize().expect("square")),
    ]
}

/// Matrix versions of [`graphs`].
pub fn matrices() -> Vec<(&'static str, CsrMatrix)> {
    graphs().into_iter().map(|(name, g)| (name, laplacian_like(&g))).collect()
}

fn corpus_of(family: Family, n: usize) -> CsrMatrix {
    let cfg = CorpusConfig {
        count: 1,
        min_n: n,
        max_n: n,
        scramble: 0.0,
        families: vec![family],
    };
    synthetic_corpus(&cfg, 7).expect("valid config").remove(0).matrix
}
