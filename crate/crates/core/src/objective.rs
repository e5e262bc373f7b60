//! Supermodular set objectives shared by greedy, local search and
//! branch-and-bound.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Graph, PrunedBfs};

/// A non-increasing supermodular set function to be minimized, evaluated
/// incrementally through a per-set state.
///
/// `gain(c)` must equal `value(S) - value(S + c)`; supermodularity means a
/// gain computed for `S` upper-bounds the gain of the same element for any
/// superset of `S`.
pub trait SetObjective {
    type State: Clone;

    /// State of the empty set. Its value is finite, so gains are defined
    /// from the very first pick.
    fn empty_state(&self) -> Self::State;

    fn value(&self, state: &Self::State) -> u64;

    fn gain(&mut self, state: &Self::State, c: usize) -> u64;

    fn insert(&mut self, state: &mut Self::State, c: usize);
}

/// Group farness on a graph. The empty set places every vertex at the
/// virtual distance `n`, larger than any real distance.
pub struct Farness<'g> {
    graph: &'g Graph,
    bfs: PrunedBfs,
}

impl<'g> Farness<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Farness {
            graph,
            bfs: PrunedBfs::new(graph.n()),
        }
    }
}

impl SetObjective for Farness<'_> {
    type State = Vec<u32>;

    fn empty_state(&self) -> Vec<u32> {
        vec![self.graph.n() as u32; self.graph.n()]
    }

    fn value(&self, state: &Vec<u32>) -> u64 {
        state.iter().map(|&d| d as u64).sum()
    }

    fn gain(&mut self, state: &Vec<u32>, c: usize) -> u64 {
        self.bfs.gain(self.graph, state, c)
    }

    fn insert(&mut self, state: &mut Vec<u32>, c: usize) {
        self.bfs.insert(self.graph, state, c)
    }
}

/// Result of a greedy run over a [`SetObjective`].
pub struct GreedyRun<S> {
    pub chosen: Vec<usize>,
    pub state: S,
    pub evaluations: u64,
}

/// Greedy selection of `k` elements from `candidates` (sorted ascending),
/// taking the largest gain each round with ties to the lowest id.
///
/// With `lazy`, stale gains from earlier rounds serve as upper bounds and
/// candidates are only re-evaluated while their stale gain could still win;
/// the selected sequence is identical to the plain variant.
pub fn greedy_select<O: SetObjective>(
    obj: &mut O,
    k: usize,
    candidates: &[usize],
    lazy: bool,
) -> GreedyRun<O::State> {
    let mut state = obj.empty_state();
    let mut chosen = Vec::with_capacity(k);
    let mut evaluations = 0u64;
    if lazy {
        // (stale gain, lowest id first, round the gain was computed in)
        let mut heap: BinaryHeap<(u64, Reverse<usize>, usize)> = candidates
            .iter()
            .map(|&c| (u64::MAX, Reverse(c), usize::MAX))
            .collect();
        for round in 0..k {
            while let Some((_, Reverse(c), at)) = heap.pop() {
                if at == round {
                    obj.insert(&mut state, c);
                    chosen.push(c);
                    break;
                }
                let fresh = obj.gain(&state, c);
                evaluations += 1;
                heap.push((fresh, Reverse(c), round));
            }
        }
    } else {
        let mut taken = vec![false; candidates.len()];
        for _ in 0..k {
            let mut best: Option<(u64, usize)> = None;
            for (i, &c) in candidates.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                let g = obj.gain(&state, c);
                evaluations += 1;
                if best.is_none_or(|(bg, _)| g > bg) {
                    best = Some((g, i));
                }
            }
            let Some((_, i)) = best else { break };
            taken[i] = true;
            obj.insert(&mut state, candidates[i]);
            chosen.push(candidates[i]);
        }
    }
    GreedyRun {
        chosen,
        state,
        evaluations,
    }
}
