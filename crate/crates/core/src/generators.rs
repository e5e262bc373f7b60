//! Graph generators: the greedy counterexample family, seeded random
//! connected graphs and a few named shapes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Vertex ids of the named vertices in a counterexample graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Landmarks {
    pub r: usize,
    pub k: usize,
    pub center: usize,
    /// `e_1, ..., e_k`, ascending.
    pub ends: Vec<usize>,
}

/// Center `c` (id 0) with `k` flowers. Flower `i` is a path of `r - 1`
/// vertices hanging off `c` and ending in `e_i`, with `r^2` leaves on `e_i`.
/// For `k = 2` this is a path of `2r - 1` vertices with `c` in the middle
/// and `r^2` leaves on each end.
///
/// Panics if `r < 2` or `k < 2`.
pub fn gen_counterexample(r: usize, k: usize) -> (Graph, Landmarks) {
    assert!(r >= 2 && k >= 2, "counterexample needs r >= 2 and k >= 2");
    let n = 1 + k * (r - 1 + r * r);
    let mut edges = Vec::with_capacity(n - 1);
    let mut ends = Vec::with_capacity(k);
    let mut next = 1;
    for _ in 0..k {
        let mut prev = 0;
        for _ in 0..r - 1 {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        ends.push(prev);
        for _ in 0..r * r {
            edges.push((prev, next));
            next += 1;
        }
    }
    debug_assert_eq!(next, n);
    let g = Graph::from_edges(n, edges).expect("flower graph is connected");
    (
        g,
        Landmarks {
            r,
            k,
            center: 0,
            ends,
        },
    )
}

const GNP_RETRIES: usize = 64;

/// `G(n, p)` conditioned on being connected. Resamples up to a retry cap,
/// then overlays `G(n, p)` on a random spanning tree. Deterministic in
/// `seed`.
pub fn gen_random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let n = n.max(1);
    let p = p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GNP_RETRIES {
        let edges = gnp_edges(&mut rng, n, p);
        if let Ok(g) = Graph::from_edges(n, edges) {
            return g;
        }
    }
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    edges.extend(gnp_edges(&mut rng, n, p));
    Graph::from_edges(n, edges).expect("spanning tree makes the graph connected")
}

fn gnp_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum NamedGraph {
    Path { n: usize },
    /// Center 0 with `leaves` leaves.
    Star { leaves: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Grid { rows: usize, cols: usize },
    /// Subdivided star: `arms` paths of `length` edges sharing vertex 0.
    Spider { arms: usize, length: usize },
}

pub fn gen_named(kind: NamedGraph) -> Result<Graph> {
    let bad = |what: &str| Error::InvalidParameter(format!("invalid size for {what}"));
    match kind {
        NamedGraph::Path { n } => {
            if n == 0 {
                return Err(bad("path"));
            }
            Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
        }
        NamedGraph::Star { leaves } => {
            if leaves == 0 {
                return Err(bad("star"));
            }
            Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i)))
        }
        NamedGraph::Cycle { n } => {
            if n < 3 {
                return Err(bad("cycle"));
            }
            Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        NamedGraph::Complete { n } => {
            if n == 0 {
                return Err(bad("complete graph"));
            }
            Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
        }
        NamedGraph::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(bad("grid"));
            }
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
            Graph::from_edges(rows * cols, edges)
        }
        NamedGraph::Spider { arms, length } => {
            if arms == 0 || length == 0 {
                return Err(bad("spider"));
            }
            let mut edges = Vec::new();
            for a in 0..arms {
                let base = 1 + a * length;
                edges.push((0, base));
                for i in 1..length {
                    edges.push((base + i - 1, base + i));
                }
            }
            Graph::from_edges(1 + arms * length, edges)
        }
    }
}
