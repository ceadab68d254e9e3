//! Breadth-first half-edge exploration of a neighbourhood.
//!
//! The state partitions the half-edges into active `A_t`, connected `C_t`
//! and unexplored `U_t`. Each step takes the active half-edge `e_t` that
//! is smallest in `(distance, vertex id, slot)` order and reveals its
//! partner `σ(e_t)`. If the partner was still unexplored, its vertex is
//! discovered and its other half-edges become active (`X_t` of them).
//! If the partner was already active, a cycle closes (`ε_t = 1`).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{HalfEdge, MultiGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Root {
    Vertex(usize),
    /// Directed edge `(u, v)` given by the half-edge at its tail `u`. The
    /// exploration starts at `v` with the edge `{u, v}` deleted.
    DirectedEdge(HalfEdge),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HalfEdgeStatus {
    Unexplored,
    Active,
    Connected,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplorationState {
    #[serde(skip)]
    pub status: Vec<HalfEdgeStatus>,
    pub active: usize,
    pub connected: usize,
    pub unexplored: usize,
    /// Completed steps `t`.
    pub step: usize,
    /// `Σ ε_k`.
    pub collisions: usize,
    /// `X_1, …, X_t`.
    pub discovered: Vec<usize>,
    /// `ε_1, …, ε_t`.
    pub closed_cycle: Vec<bool>,
    /// First step at which the active set is empty.
    pub tau1: Option<usize>,
}

impl ExplorationState {
    /// Recounts the three classes and compares with the running totals.
    pub fn partition_holds(&self) -> bool {
        let mut counts = [0usize; 3];
        for s in &self.status {
            counts[*s as usize] += 1;
        }
        counts == [self.unexplored, self.active, self.connected]
            && counts.iter().sum::<usize>() == self.status.len()
    }
}

/// Step-by-step exploration driver.
pub struct Explorer<'g> {
    g: &'g MultiGraph,
    distance: Vec<usize>,
    queue: BTreeSet<(usize, usize, HalfEdge)>,
    state: ExplorationState,
}

impl<'g> Explorer<'g> {
    pub fn new(g: &'g MultiGraph, root: Root) -> Self {
        let total = g.half_edge_count();
        let mut status = vec![HalfEdgeStatus::Unexplored; total];
        let mut distance = vec![usize::MAX; g.n()];
        let (start, removed) = match root {
            Root::Vertex(v) => (v, None),
            Root::DirectedEdge(h) => (g.vertex_of(g.partner(h)), Some((h, g.partner(h)))),
        };
        let mut connected = 0;
        if let Some((h, p)) = removed {
            status[h] = HalfEdgeStatus::Connected;
            status[p] = HalfEdgeStatus::Connected;
            connected = 2;
        }
        distance[start] = 0;
        let mut queue = BTreeSet::new();
        for h in g.half_edges(start) {
            if status[h] == HalfEdgeStatus::Unexplored {
                status[h] = HalfEdgeStatus::Active;
                queue.insert((0, start, h));
            }
        }
        let active = queue.len();
        let state = ExplorationState {
            status,
            active,
            connected,
            unexplored: total - active - connected,
            step: 0,
            collisions: 0,
            discovered: Vec::new(),
            closed_cycle: Vec::new(),
            tau1: if active == 0 { Some(0) } else { None },
        };
        Self {
            g,
            distance,
            queue,
            state,
        }
    }

    /// Distance of the vertex owning the next half-edge to be processed.
    pub fn frontier_distance(&self) -> Option<usize> {
        self.queue.first().map(|&(d, _, _)| d)
    }

    pub fn state(&self) -> &ExplorationState {
        &self.state
    }

    pub fn distance(&self, v: usize) -> Option<usize> {
        (self.distance[v] != usize::MAX).then_some(self.distance[v])
    }

    /// Performs one step; `None` once the active set is empty.
    pub fn step(&mut self) -> Option<(usize, bool)> {
        let (d, _, e) = self.queue.pop_first()?;
        let g = self.g;
        let st = &mut self.state;
        let f = g.partner(e);
        let w = g.vertex_of(f);
        st.status[e] = HalfEdgeStatus::Connected;
        st.active -= 1;
        let closed = st.status[f] == HalfEdgeStatus::Active;
        let mut x = 0;
        if closed {
            self.queue.remove(&(self.distance[w], w, f));
            st.active -= 1;
        } else {
            st.unexplored -= 1;
            self.distance[w] = d + 1;
            for h in g.half_edges(w) {
                if h != f && st.status[h] == HalfEdgeStatus::Unexplored {
                    st.status[h] = HalfEdgeStatus::Active;
                    self.queue.insert((d + 1, w, h));
                    x += 1;
                }
            }
            st.unexplored -= x;
            st.active += x;
        }
        st.status[f] = HalfEdgeStatus::Connected;
        st.connected += 2;
        st.step += 1;
        st.collisions += closed as usize;
        st.discovered.push(x);
        st.closed_cycle.push(closed);
        if st.active == 0 && st.tau1.is_none() {
            st.tau1 = Some(st.step);
        }
        debug_assert!(st.partition_holds());
        Some((x, closed))
    }

    pub fn into_state(self) -> ExplorationState {
        self.state
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Exploration {
    /// No cycle was closed inside the explored ball.
    pub is_tree: bool,
    /// `S[t]`: non-backtracking walks of length `t` from the root, `t ≤ radius`.
    pub walk_counts: Vec<u64>,
    pub state: ExplorationState,
}

/// Explores until every vertex within `radius` of the root is revealed, i.e.
/// until the next active half-edge sits at distance `radius` or more.
pub fn explore_neighborhood(g: &MultiGraph, root: Root, radius: usize) -> Exploration {
    let mut ex = Explorer::new(g, root);
    while ex.frontier_distance().is_some_and(|d| d < radius) {
        ex.step();
    }
    let state = ex.into_state();
    Exploration {
        is_tree: state.collisions == 0,
        walk_counts: root_walk_counts(g, root, radius),
        state,
    }
}

/// Counts non-backtracking walks from the root by propagating per-half-edge
/// walk counts. For a directed-edge root the edge is removed first.
fn root_walk_counts(g: &MultiGraph, root: Root, radius: usize) -> Vec<u64> {
    let (start, removed) = match root {
        Root::Vertex(v) => (v, None),
        Root::DirectedEdge(h) => (g.vertex_of(g.partner(h)), Some((h, g.partner(h)))),
    };
    let allowed = |h: HalfEdge| removed.is_none_or(|(a, b)| h != a && h != b);
    let mut counts = vec![1u64];
    // Last directed edge of the walk (as the half-edge at its tail) → count.
    let mut frontier: BTreeMap<HalfEdge, u64> =
        g.half_edges(start).filter(|&h| allowed(h)).map(|h| (h, 1)).collect();
    for _ in 1..=radius {
        counts.push(frontier.values().fold(0u64, |a, &c| a.saturating_add(c)));
        let mut next: BTreeMap<HalfEdge, u64> = BTreeMap::new();
        for (&h, &c) in &frontier {
            let back = g.partner(h);
            for f in g.half_edges(g.vertex_of(back)) {
                if f != back && allowed(f) {
                    let slot = next.entry(f).or_insert(0);
                    *slot = slot.saturating_add(c);
                }
            }
        }
        frontier = next;
    }
    counts
}
