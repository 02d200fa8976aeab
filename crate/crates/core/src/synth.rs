//! Seeded generators for synthetic symmetric test matrices.
//!
//! Every generator returns a structurally symmetric matrix with `-1` off the
//! diagonal and `degree + 1` on it, so the result is diagonally dominant.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{AdjacencyGraph, CsrMatrix, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Random entries within a fixed half-bandwidth.
    Banded,
    /// 5- or 9-point stencil on a rectangle, from square to long and thin.
    Grid2d,
    /// 7-point stencil on a box.
    Grid3d,
    /// Uniform random graph with a given mean degree.
    RandomSparse,
    /// Random spanning tree plus a few extra edges.
    TreeLike,
    /// Dense diagonal blocks with sparse coupling, optionally a dense border.
    Block,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Banded,
        Family::Grid2d,
        Family::Grid3d,
        Family::RandomSparse,
        Family::TreeLike,
        Family::Block,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Banded => "banded",
            Family::Grid2d => "grid2d",
            Family::Grid3d => "grid3d",
            Family::RandomSparse => "random",
            Family::TreeLike => "tree",
            Family::Block => "block",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown matrix family `{s}`")))
    }
}

/// Matrix with `-1` on every edge of `g` and `degree + 1` on the diagonal.
pub fn laplacian_like(g: &AdjacencyGraph) -> CsrMatrix {
    let n = g.n();
    let mut triplets = Vec::with_capacity(n + 2 * g.n_edges());
    for v in 0..n {
        triplets.push((v, v, g.degree(v) as f64 + 1.0));
        triplets.extend(g.neighbors(v).iter().map(|&u| (v, u, -1.0)));
    }
    CsrMatrix::from_triplets(n, n, triplets).expect("graph indices in range")
}

pub fn banded(n: usize, half_band: usize, density: f64, rng: &mut impl Rng) -> AdjacencyGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n.min(i + half_band + 1) {
            // the first off-diagonal keeps the matrix irreducible
            if j == i + 1 || rng.random_bool(density) {
                edges.push((i, j));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).expect("indices in range")
}

pub fn grid2d(rows: usize, cols: usize, nine_point: bool) -> AdjacencyGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
                if nine_point {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r + 1, c + 1)));
                    }
                    if c > 0 {
                        edges.push((id(r, c), id(r + 1, c - 1)));
                    }
                }
            }
        }
    }
    AdjacencyGraph::from_edges(rows * cols, edges).expect("indices in range")
}

pub fn grid3d(nx: usize, ny: usize, nz: usize) -> AdjacencyGraph {
    let id = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut edges = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if x + 1 < nx {
                    edges.push((id(x, y, z), id(x + 1, y, z)));
                }
                if y + 1 < ny {
                    edges.push((id(x, y, z), id(x, y + 1, z)));
                }
                if z + 1 < nz {
                    edges.push((id(x, y, z), id(x, y, z + 1)));
                }
            }
        }
    }
    AdjacencyGraph::from_edges(nx * ny * nz, edges).expect("indices in range")
}

pub fn random_sparse(n: usize, mean_degree: f64, rng: &mut impl Rng) -> AdjacencyGraph {
    let m = (mean_degree * n as f64 / 2.0).round() as usize;
    let mut edges = Vec::with_capacity(m);
    if n > 1 {
        for _ in 0..m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).expect("indices in range")
}

pub fn tree_like(n: usize, extra_edges: usize, rng: &mut impl Rng) -> AdjacencyGraph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (k, rng.random_range(0..k))).collect();
    if n > 1 {
        for _ in 0..extra_edges {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).expect("indices in range")
}

/// `blocks` diagonal blocks of `size` rows filled with probability
/// `fill`, each linked to the next by `coupling` random edges, plus a
/// border of `border` rows coupled to a random tenth of the others.
pub fn block_structured(
    blocks: usize,
    size: usize,
    fill: f64,
    coupling: usize,
    border: usize,
    rng: &mut impl Rng,
) -> AdjacencyGraph {
    let body = blocks * size;
    let n = body + border;
    let mut edges = Vec::new();
    for b in 0..blocks {
        let base = b * size;
        for i in 0..size {
            for j in i + 1..size {
                if j == i + 1 || rng.random_bool(fill) {
                    edges.push((base + i, base + j));
                }
            }
        }
        if b + 1 < blocks {
            for _ in 0..coupling {
                edges.push((base + rng.random_range(0..size), base + size + rng.random_range(0..size)));
            }
        }
    }
    for k in body..n {
        for v in 0..body {
            if rng.random_bool(0.1) {
                edges.push((k, v));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).expect("indices in range")
}

/// One member of `family` with roughly `n` rows (grids round to whole
/// dimensions), drawn from `rng`.
pub fn generate(family: Family, n: usize, rng: &mut impl Rng) -> AdjacencyGraph {
    let n = n.max(2);
    match family {
        Family::Banded => {
            let half_band = rng.random_range(1..=(n / 4).clamp(1, 60));
            banded(n, half_band, rng.random_range(0.1..0.8), rng)
        }
        Family::Grid2d => {
            let aspect = rng.random_range(1.0f64..30.0);
            let rows = ((n as f64 / aspect).sqrt().round() as usize).max(2);
            let cols = (n / rows).max(2);
            grid2d(rows, cols, rng.random_bool(0.5))
        }
        Family::Grid3d => {
            let side = (n as f64).cbrt();
            let stretch = rng.random_range(1.0f64..2.0);
            let nx = ((side * stretch).round() as usize).max(2);
            let ny = (side.round() as usize).max(2);
            let nz = (n / (nx * ny)).max(2);
            grid3d(nx, ny, nz)
        }
        Family::RandomSparse => random_sparse(n, rng.random_range(2.0..8.0), rng),
        Family::TreeLike => {
            let extra = rng.random_range(0..=n / 20);
            tree_like(n, extra, rng)
        }
        Family::Block => {
            let size = rng.random_range(5..=40).min(n);
            let blocks = (n / size).max(1);
            let border = if rng.random_bool(0.5) { rng.random_range(1..=4) } else { 0 };
            block_structured(blocks, size, rng.random_range(0.3..0.9), rng.random_range(1..=4), border, rng)
        }
    }
}

/// A generated matrix and where it came from.
#[derive(Clone, Debug)]
pub struct SynthMatrix {
    pub name: String,
    pub family: Family,
    pub matrix: CsrMatrix,
}

/// Options for [`synthetic_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub count: usize,
    pub min_n: usize,
    pub max_n: usize,
    /// Share of matrices whose rows and columns are randomly renumbered.
    pub scramble: f64,
    pub families: Vec<Family>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            count: 400,
            min_n: 50,
            max_n: 2000,
            scramble: 0.0,
            families: Family::ALL.to_vec(),
        }
    }
}

/// `cfg.count` matrices cycling through `cfg.families`. Matrix `k` depends
/// only on `seed` and `k`.
pub fn synthetic_corpus(cfg: &CorpusConfig, seed: u64) -> Result<Vec<SynthMatrix>> {
    if cfg.families.is_empty() {
        return Err(Error::Config("no matrix families selected".into()));
    }
    if cfg.min_n < 2 || cfg.min_n > cfg.max_n {
        return Err(Error::Config(format!(
            "invalid size range [{}, {}]",
            cfg.min_n, cfg.max_n
        )));
    }
    if !(0.0..=1.0).contains(&cfg.scramble) {
        return Err(Error::Config(format!("scramble share {} outside [0, 1]", cfg.scramble)));
    }
    let corpus = (0..cfg.count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let family = cfg.families[k % cfg.families.len()];
            // grids round their dimensions, so redraw until the size fits
            let mut g = loop {
                let n = rng.random_range(cfg.min_n..=cfg.max_n);
                let g = generate(family, n, &mut rng);
                if (cfg.min_n..=cfg.max_n).contains(&g.n()) {
                    break g;
                }
            };
            if rng.random_bool(cfg.scramble) {
                let mut perm: Vec<usize> = (0..g.n()).collect();
                perm.shuffle(&mut rng);
                g = g.permute(&Permutation::new(perm).expect("shuffle is a bijection"))?;
            }
            Ok(SynthMatrix {
                name: format!("synth_{k:04}_{family}"),
                family,
                matrix: laplacian_like(&g),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(corpus)
}
