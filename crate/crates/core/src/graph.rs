//! Immutable undirected graphs in compressed adjacency form, plus the
//! distance kernels (BFS, multi-source BFS, group farness, eccentricities)
//! that the rest of the crate builds on.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Hop-count distances, one entry per vertex.
pub type Distances = Vec<u32>;

/// Sorted set of distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    /// All vertices `0..n`.
    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Members of `0..n` not in this set.
    pub fn complement(&self, n: usize) -> VertexSet {
        let mut out = Vec::with_capacity(n.saturating_sub(self.len()));
        let mut it = self.0.iter().peekable();
        for v in 0..n {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                out.push(v);
            }
        }
        VertexSet(out)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub(crate) fn check_within(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= n => Err(Error::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Undirected, simple, connected graph with dense vertex ids `0..n`.
///
/// Neighbor lists are stored back to back in `targets`; the neighbors of `v`
/// are `targets[offsets[v]..offsets[v + 1]]`, sorted ascending. The original
/// vertex labels from the input file are kept in `labels`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph on vertices `0..n`. Self-loops and duplicate edges are
    /// dropped. Fails if the result is disconnected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    /// Like [`Graph::from_edges`] with explicit labels, one per vertex.
    pub fn with_labels(
        labels: Vec<u64>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        let g = Graph {
            offsets,
            targets,
            labels,
        };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let dist = bfs(self, 0);
        match dist.iter().position(|&d| d == UNREACHED) {
            Some(v) => Err(Error::Disconnected(self.labels[0], self.labels[v])),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Edge density `2m / (n (n - 1))`.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if n < 2.0 {
            return 0.0;
        }
        2.0 * self.m() as f64 / (n * (n - 1.0))
    }
}

pub(crate) const UNREACHED: u32 = u32::MAX;

/// Single-source BFS distances.
pub fn bfs(g: &Graph, source: usize) -> Distances {
    multi_source_bfs(g, std::iter::once(source))
}

fn multi_source_bfs(g: &Graph, sources: impl IntoIterator<Item = usize>) -> Distances {
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &w in g.neighbors(u) {
            if dist[w] == UNREACHED {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn check_set(g: &Graph, set: &VertexSet) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    set.check_within(g.n())
}

/// `dist(v, S)` for every vertex `v`.
pub fn dist_to_set(g: &Graph, set: &VertexSet) -> Result<Distances> {
    check_set(g, set)?;
    Ok(multi_source_bfs(g, set.iter()))
}

/// Group farness `f(S) = sum_v dist(v, S)`.
pub fn group_farness(g: &Graph, set: &VertexSet) -> Result<u64> {
    Ok(dist_to_set(g, set)?.iter().map(|&d| d as u64).sum())
}

/// Group closeness `(n - |S|) / f(S)` as an exact rational.
pub fn group_closeness(g: &Graph, set: &VertexSet) -> Result<Ratio<u64>> {
    let f = group_farness(g, set)?;
    if f == 0 {
        return Err(Error::ClosenessUndefined);
    }
    Ok(Ratio::new((g.n() - set.len()) as u64, f))
}

/// Per-vertex eccentricities and the diameter, via one BFS per vertex.
pub fn eccentricities(g: &Graph) -> (Vec<u32>, u32) {
    let ecc: Vec<u32> = (0..g.n())
        .into_par_iter()
        .map(|v| bfs(g, v).into_iter().max().unwrap_or(0))
        .collect();
    let diameter = ecc.iter().copied().max().unwrap_or(0);
    (ecc, diameter)
}

/// Single-threaded [`eccentricities`].
pub fn eccentricities_serial(g: &Graph) -> (Vec<u32>, u32) {
    let ecc: Vec<u32> = (0..g.n())
        .map(|v| bfs(g, v).into_iter().max().unwrap_or(0))
        .collect();
    let diameter = ecc.iter().copied().max().unwrap_or(0);
    (ecc, diameter)
}

/// Reusable buffers for the pruned BFS used by marginal-gain evaluation.
#[derive(Clone, Debug, Default)]
pub(crate) struct PrunedBfs {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<(usize, u32)>,
}

impl PrunedBfs {
    pub(crate) fn new(n: usize) -> Self {
        PrunedBfs {
            stamp: vec![0; n],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// Runs a BFS from `source` that stops at every vertex `x` whose current
    /// distance `cur[x]` is already no larger than the BFS depth; past such a
    /// vertex the current set reaches everything at least as fast. Calls
    /// `visit(x, depth)` for each vertex that strictly improves.
    fn run(
        &mut self,
        g: &Graph,
        cur: &[u32],
        source: usize,
        mut visit: impl FnMut(usize, u32),
    ) {
        self.next_epoch();
        self.queue.clear();
        if cur[source] == 0 {
            return;
        }
        self.stamp[source] = self.epoch;
        self.queue.push((source, 0));
        let mut head = 0;
        while head < self.queue.len() {
            let (u, d) = self.queue[head];
            head += 1;
            visit(u, d);
            for &w in g.neighbors(u) {
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    if d + 1 < cur[w] {
                        self.queue.push((w, d + 1));
                    }
                }
            }
        }
    }

    /// `f(S) - f(S + c)` where `cur` holds `dist(., S)`.
    pub(crate) fn gain(&mut self, g: &Graph, cur: &[u32], c: usize) -> u64 {
        let mut total = 0u64;
        self.run(g, cur, c, |x, d| total += (cur[x] - d) as u64);
        total
    }

    /// Updates `cur` in place to `dist(., S + c)`.
    pub(crate) fn insert(&mut self, g: &Graph, cur: &mut [u32], c: usize) {
        let mut improved = Vec::new();
        self.run(g, cur, c, |x, d| improved.push((x, d)));
        for (x, d) in improved {
            cur[x] = d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    /// All-pairs distances by Floyd-Warshall, independent of the BFS code.
    fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
        let n = g.n();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0;
        }
        for (u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for w in 0..n {
            for u in 0..n {
                for v in 0..n {
                    if d[u][w] + d[w][v] < d[u][v] {
                        d[u][v] = d[u][w] + d[w][v];
                    }
                }
            }
        }
        d
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..14).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), proptest::collection::vec(any::<bool>(), pairs), any::<u64>())
        })
        .prop_map(|(n, mask, seed)| {
            let mut edges = Vec::new();
            // random spanning tree keeps the graph connected
            let mut s = seed;
            for v in 1..n {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                edges.push(((s >> 33) as usize % v, v));
            }
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[idx] {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    }

    #[test]
    fn csr_layout_is_sorted_and_symmetric() {
        let g = Graph::from_edges(4, [(3, 0), (0, 1), (2, 1), (1, 0)]).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.neighbors(0), &[1, 3]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        for u in 0..4 {
            for &v in g.neighbors(u) {
                assert!(g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn disconnected_is_rejected() {
        let err = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap_err();
        assert!(matches!(err, Error::Disconnected(0, 2)));
    }

    #[test]
    fn bfs_on_path_and_star() {
        assert_eq!(bfs(&path(4), 0), vec![0, 1, 2, 3]);
        assert_eq!(bfs(&star(5), 0), vec![0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn dist_to_set_examples() {
        let p5 = path(5);
        assert_eq!(
            dist_to_set(&p5, &VertexSet::new([0, 4])).unwrap(),
            vec![0, 1, 2, 1, 0]
        );
        assert!(dist_to_set(&p5, &VertexSet::full(5))
            .unwrap()
            .iter()
            .all(|&d| d == 0));
        assert!(matches!(
            dist_to_set(&p5, &VertexSet::empty()),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn farness_and_closeness_examples() {
        let p5 = path(5);
        let k15 = star(5);
        assert_eq!(group_farness(&p5, &VertexSet::new([2])).unwrap(), 6);
        assert_eq!(group_farness(&k15, &VertexSet::new([0])).unwrap(), 5);
        assert_eq!(group_farness(&p5, &VertexSet::full(5)).unwrap(), 0);
        assert_eq!(
            group_closeness(&k15, &VertexSet::new([0])).unwrap(),
            Ratio::new(1, 1)
        );
        assert_eq!(
            group_closeness(&p5, &VertexSet::new([2])).unwrap(),
            Ratio::new(4, 6)
        );
        assert!(matches!(
            group_closeness(&p5, &VertexSet::full(5)),
            Err(Error::ClosenessUndefined)
        ));
        assert!(matches!(
            group_farness(&p5, &VertexSet::new([7])),
            Err(Error::VertexOutOfRange { vertex: 7, n: 5 })
        ));
    }

    #[test]
    fn eccentricity_examples() {
        assert_eq!(eccentricities(&path(5)), (vec![4, 3, 2, 3, 4], 4));
        let (ecc, diam) = eccentricities(&star(5));
        assert_eq!(ecc[0], 1);
        assert!(ecc[1..].iter().all(|&e| e == 2));
        assert_eq!(diam, 2);
    }

    #[test]
    fn pruned_gain_matches_recomputation() {
        let g = path(7);
        let cur = dist_to_set(&g, &VertexSet::new([0])).unwrap();
        let mut bfs = PrunedBfs::new(g.n());
        let before = group_farness(&g, &VertexSet::new([0])).unwrap();
        let after = group_farness(&g, &VertexSet::new([0, 5])).unwrap();
        assert_eq!(bfs.gain(&g, &cur, 5), before - after);
        let mut upd = cur.clone();
        bfs.insert(&g, &mut upd, 5);
        assert_eq!(upd, dist_to_set(&g, &VertexSet::new([0, 5])).unwrap());
    }

    proptest! {
        #[test]
        fn bfs_matches_floyd_warshall(g in arb_graph(), s in any::<prop::sample::Index>()) {
            let fw = floyd_warshall(&g);
            let src = s.index(g.n());
            prop_assert_eq!(bfs(&g, src), fw[src].clone());
            let (ecc, diam) = eccentricities(&g);
            for v in 0..g.n() {
                prop_assert_eq!(ecc[v], *fw[v].iter().max().unwrap());
            }
            prop_assert_eq!(diam, *ecc.iter().max().unwrap());
        }

        #[test]
        fn dist_to_set_is_rowwise_min(g in arb_graph(), mask in any::<u64>()) {
            let n = g.n();
            let mut set: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            if set.is_empty() { set.push(0); }
            let set = VertexSet::new(set);
            let d = dist_to_set(&g, &set).unwrap();
            let (ecc, _) = eccentricities(&g);
            for v in 0..n {
                let m = set.iter().map(|s| bfs(&g, s)[v]).min().unwrap();
                prop_assert_eq!(d[v], m);
                prop_assert_eq!(d[v] == 0, set.contains(v));
                prop_assert!(d[v] <= ecc[v]);
            }
            for (u, v) in g.edges() {
                prop_assert!(d[u].abs_diff(d[v]) <= 1);
            }
        }

        #[test]
        fn farness_is_monotone_and_supermodular(
            g in arb_graph(),
            a_mask in any::<u64>(),
            b_extra in any::<u64>(),
            e in any::<prop::sample::Index>(),
        ) {
            let n = g.n();
            let e = e.index(n);
            let mut a: Vec<usize> = (0..n).filter(|v| a_mask >> v & 1 == 1 && *v != e).collect();
            if a.is_empty() {
                a.push(if e == 0 { 1 } else { 0 });
            }
            let b: Vec<usize> = a
                .iter()
                .copied()
                .chain((0..n).filter(|v| b_extra >> v & 1 == 1 && *v != e))
                .collect();
            let (a, b) = (VertexSet::new(a), VertexSet::new(b));
            let f = |s: &VertexSet| group_farness(&g, s).unwrap() as i64;
            let with = |s: &VertexSet| VertexSet::new(s.iter().chain([e]));
            prop_assert!(f(&b) <= f(&a));
            // Δ(e|A) <= Δ(e|B) with Δ(e|X) = f(X + e) - f(X)
            prop_assert!(f(&with(&a)) - f(&a) <= f(&with(&b)) - f(&b));
        }
    }
}
