//! Data reduction: dominated vertices, cut vertices and absorbed vertices.
//!
//! A vertex `v` is dominated by `u` when `N[v] ⊆ N[u]`; some optimal solution
//! then avoids `v`, so `v` loses its level-0 variable. A dominated vertex is
//! absorbed by `u` when every path from it to a feasible center passes
//! through `u`, which pins `dist(v, S) = dist(u, S) + 1` and lets `u` carry
//! its cost.

use crate::graph::{Graph, VertexSet};

/// Output of [`reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub dominated: VertexSet,
    pub absorbed: VertexSet,
    /// Number of vertices absorbed by each vertex (0 for absorbed vertices).
    pub alpha: Vec<u32>,
    /// Absorber of each absorbed vertex.
    pub rho: Vec<Option<usize>>,
    /// Dominator recorded when a vertex was marked dominated.
    pub dominator: Vec<Option<usize>>,
}

impl ReductionResult {
    /// No reduction at all: every vertex is a candidate.
    pub fn none(n: usize) -> Self {
        ReductionResult {
            dominated: VertexSet::empty(),
            absorbed: VertexSet::empty(),
            alpha: vec![0; n],
            rho: vec![None; n],
            dominator: vec![None; n],
        }
    }

    /// Domination only, no absorption.
    pub fn dominated_only(g: &Graph, k: usize) -> Self {
        let (dominated, dominator, _) = dominated_with_stats(g, k);
        ReductionResult {
            dominated,
            dominator,
            ..ReductionResult::none(g.n())
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// `V \ D`: the vertices allowed in a solution.
    pub fn centers(&self) -> VertexSet {
        self.dominated.complement(self.n())
    }

    /// A dominator of `v` outside `D`, following the recorded chain.
    /// Domination is transitive, so the end of the chain dominates `v`.
    pub fn surviving_dominator(&self, v: usize) -> usize {
        let mut u = v;
        while let Some(next) = self.dominator[u] {
            u = next;
        }
        u
    }
}

/// Computes `D`, then `A`, `alpha` and `rho`.
pub fn reduce(g: &Graph, k: usize) -> ReductionResult {
    let (dominated, dominator, _) = dominated_with_stats(g, k);
    let (absorbed, alpha, rho) = compute_absorbed(g, &dominated);
    ReductionResult {
        dominated,
        absorbed,
        alpha,
        rho,
        dominator,
    }
}

pub fn compute_dominated(g: &Graph, k: usize) -> VertexSet {
    dominated_with_stats(g, k).0
}

/// `N[v] ⊆ N[u]` for adjacent `u`, `v`, by a merge over the sorted lists.
/// Adds the number of list steps taken to `ops`.
fn closed_nbhd_subset(g: &Graph, v: usize, u: usize, ops: &mut u64) -> bool {
    let (nv, nu) = (g.neighbors(v), g.neighbors(u));
    if nv.len() > nu.len() {
        return false;
    }
    let mut j = 0;
    for &w in nv {
        if w == u {
            continue;
        }
        while j < nu.len() && nu[j] < w {
            j += 1;
            *ops += 1;
        }
        *ops += 1;
        if j == nu.len() || nu[j] != w {
            return false;
        }
    }
    true
}

/// Greedy domination marking in increasing id order.
///
/// `v` is marked when some neighbor `u` outside `D` dominates it; for twins
/// (`N[v] = N[u]`) only the larger id may be marked. Marking stops once
/// `|V \ D|` would drop below `k`. Returns `D`, the dominator used for each
/// marked vertex and the number of adjacency steps spent.
pub fn dominated_with_stats(g: &Graph, k: usize) -> (VertexSet, Vec<Option<usize>>, u64) {
    let n = g.n();
    let mut in_d = vec![false; n];
    let mut dominator = vec![None; n];
    let mut remaining = n;
    let mut ops = 0u64;
    for v in 0..n {
        if remaining <= k {
            break;
        }
        for &u in g.neighbors(v) {
            ops += 1;
            if in_d[u] {
                continue;
            }
            let twins = g.degree(u) == g.degree(v);
            if twins && u > v {
                continue;
            }
            if closed_nbhd_subset(g, v, u, &mut ops) {
                in_d[v] = true;
                dominator[v] = Some(u);
                remaining -= 1;
                break;
            }
        }
    }
    let d = VertexSet::new((0..n).filter(|&v| in_d[v]));
    (d, dominator, ops)
}

/// Cut vertices via an iterative lowpoint DFS.
pub fn cut_vertices(g: &Graph) -> VertexSet {
    let n = g.n();
    let mut disc = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut is_cut = vec![false; n];
    let mut time = 0u32;
    // (vertex, parent, next neighbor index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != u32::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, parent, idx) = *top;
            if let Some(&w) = g.neighbors(v).get(idx) {
                top.2 += 1;
                if disc[w] == u32::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    VertexSet::new((0..n).filter(|&v| is_cut[v]))
}

/// Pendant rule: a degree-1 vertex in `D` is absorbed by its only neighbor,
/// unless that neighbor is itself a degree-1 vertex absorbed first (the
/// two-vertex graph).
fn absorb_pendants(g: &Graph, in_d: &[bool], rho: &mut [Option<usize>], alpha: &mut [u32]) {
    for v in 0..g.n() {
        if !in_d[v] || g.degree(v) != 1 || rho[v].is_some() || alpha[v] > 0 {
            continue;
        }
        let u = g.neighbors(v)[0];
        if rho[u].is_some() {
            continue;
        }
        rho[v] = Some(u);
        alpha[u] += 1;
    }
}

/// Component rule: for a cut vertex `u`, a component `C` of `G - u` with
/// `C ⊆ D` and every member dominated by `u` is absorbed by `u` as a whole.
/// Such a component lies inside `N(u)`, so the flood fill from each neighbor
/// only touches `N(u)` and their lists.
fn absorb_components(
    g: &Graph,
    in_d: &[bool],
    cuts: &VertexSet,
    rho: &mut [Option<usize>],
    alpha: &mut [u32],
) {
    let n = g.n();
    let mut mark = vec![usize::MAX; n];
    let mut comp_of = vec![usize::MAX; n];
    let mut component = Vec::new();
    let mut stack = Vec::new();
    for u in cuts.iter() {
        if rho[u].is_some() {
            continue;
        }
        for &w in g.neighbors(u) {
            mark[w] = u;
        }
        for &start in g.neighbors(u) {
            if comp_of[start] == u {
                continue;
            }
            component.clear();
            stack.clear();
            comp_of[start] = u;
            stack.push(start);
            let mut ok = true;
            while let Some(x) = stack.pop() {
                component.push(x);
                if !in_d[x] || rho[x].is_some() || alpha[x] > 0 || !dominated_by_marked(g, x, u, &mark)
                {
                    ok = false;
                }
                for &y in g.neighbors(x) {
                    if y == u || comp_of[y] == u {
                        continue;
                    }
                    if mark[y] != u {
                        // leaves N(u): the component is not inside N(u)
                        ok = false;
                        continue;
                    }
                    comp_of[y] = u;
                    stack.push(y);
                }
            }
            if ok {
                for &x in &component {
                    rho[x] = Some(u);
                }
                alpha[u] += component.len() as u32;
            }
        }
    }
}

/// `N[x] ⊆ N[u]` given that `mark[y] == u` exactly for `y ∈ N(u)`.
fn dominated_by_marked(g: &Graph, x: usize, u: usize, mark: &[usize]) -> bool {
    mark[x] == u && g.neighbors(x).iter().all(|&y| y == u || mark[y] == u)
}

/// Absorbed set `A`, counts `alpha` and absorber map `rho` for a given `D`.
pub fn compute_absorbed(g: &Graph, dominated: &VertexSet) -> (VertexSet, Vec<u32>, Vec<Option<usize>>) {
    let n = g.n();
    let mut in_d = vec![false; n];
    for v in dominated.iter() {
        in_d[v] = true;
    }
    let mut rho = vec![None; n];
    let mut alpha = vec![0u32; n];
    absorb_pendants(g, &in_d, &mut rho, &mut alpha);
    absorb_components(g, &in_d, &cut_vertices(g), &mut rho, &mut alpha);
    let absorbed = VertexSet::new((0..n).filter(|&v| rho[v].is_some()));
    (absorbed, alpha, rho)
}
