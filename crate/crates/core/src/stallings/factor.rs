//! Regular completion, Euler orientation and the split into 2-factors.

use std::collections::HashMap;

use super::{LabeledEdge, LabeledGraph};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// A directed edge `(tail, head)`.
pub type Arc = (usize, usize);

/// Adds edges until every degree is `2r`: an edge between the two
/// lowest-numbered deficient vertices while there are two, then loops at
/// the last one. Parallel edges and loops are allowed.
pub fn complete_to_regular(g: &MultiGraph, r: usize) -> Result<MultiGraph> {
    let target = 2 * r;
    if g.max_degree() > target {
        return Err(Error::Precondition(format!(
            "max degree {} exceeds 2r = {target}",
            g.max_degree()
        )));
    }
    let mut deficit: Vec<usize> = (0..g.n()).map(|v| target - g.degree(v)).collect();
    let mut edges = g.edges();
    let mut i = 0;
    loop {
        while i < deficit.len() && deficit[i] == 0 {
            i += 1;
        }
        if i == deficit.len() {
            break;
        }
        let mut j = i + 1;
        while j < deficit.len() && deficit[j] == 0 {
            j += 1;
        }
        if j < deficit.len() {
            edges.push((i, j));
            deficit[i] -= 1;
            deficit[j] -= 1;
        } else {
            // the sum of deficits is even, so a lone deficit is even too
            debug_assert!(deficit[i].is_multiple_of(2));
            edges.push((i, i));
            deficit[i] -= 2;
        }
    }
    MultiGraph::from_edges(g.n(), &edges)
}

/// Orients every edge of a graph with even degrees so that each vertex has
/// as many outgoing as incoming edges, by walking Euler circuits. Returns
/// arcs in the order of [`MultiGraph::edges`]; a loop becomes `v → v`.
pub fn euler_orientation(g: &MultiGraph) -> Result<Vec<Arc>> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) % 2 == 1) {
        return Err(Error::Precondition(format!("vertex {v} has odd degree")));
    }
    let edges = g.edges();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (id, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(id);
        if u != v {
            incident[v].push(id);
        }
    }
    let mut used = vec![false; edges.len()];
    let mut next = vec![0usize; g.n()];
    let mut arcs = vec![(0, 0); edges.len()];
    for start in 0..g.n() {
        // Each greedy walk in an even graph closes at its own start, so
        // every walk is a closed trail and in-degree equals out-degree.
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            while next[v] < incident[v].len() && used[incident[v][next[v]]] {
                next[v] += 1;
            }
            match incident[v].get(next[v]) {
                Some(&id) => {
                    used[id] = true;
                    let (a, b) = edges[id];
                    let w = if a == v { b } else { a };
                    arcs[id] = (v, w);
                    stack.push(w);
                }
                None => {
                    stack.pop();
                }
            }
        }
    }
    Ok(arcs)
}

/// Splits a `2r`-regular multigraph into `r` spanning 2-factors, each
/// oriented so that every vertex has one outgoing and one incoming arc.
///
/// After an Euler orientation the arcs form an `r`-regular bipartite
/// multigraph between tails and heads; its `r` perfect matchings, peeled
/// off one at a time, are the factors.
pub fn two_factorize(g: &MultiGraph) -> Result<Vec<Vec<Arc>>> {
    let n = g.n();
    let d = if n == 0 { 0 } else { g.degree(0) };
    if d % 2 == 1 || (0..n).any(|v| g.degree(v) != d) {
        return Err(Error::Precondition("graph is not 2r-regular".into()));
    }
    let arcs = euler_orientation(g)?;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, &(t, _)) in arcs.iter().enumerate() {
        out[t].push(id);
    }
    let mut alive = vec![true; arcs.len()];
    let mut factors = Vec::with_capacity(d / 2);
    for _ in 0..d / 2 {
        let chosen = perfect_matching(n, &arcs, &out, &alive);
        for &id in &chosen {
            alive[id] = false;
        }
        factors.push(chosen.into_iter().map(|id| arcs[id]).collect());
    }
    Ok(factors)
}

const NONE: usize = usize::MAX;

/// A perfect matching of the regular bipartite multigraph of alive arcs,
/// as one arc id per tail. Augmenting paths, with a greedy start.
fn perfect_matching(n: usize, arcs: &[Arc], out: &[Vec<usize>], alive: &[bool]) -> Vec<usize> {
    let mut by_tail = vec![NONE; n];
    let mut by_head = vec![NONE; n];
    for u in 0..n {
        if let Some(&id) = out[u].iter().find(|&&id| alive[id] && by_head[arcs[id].1] == NONE) {
            by_tail[u] = id;
            by_head[arcs[id].1] = id;
        }
    }
    let mut seen = vec![0usize; n];
    let mut stamp = 0;
    for u in 0..n {
        if by_tail[u] != NONE {
            continue;
        }
        stamp += 1;
        let mut stack = vec![(u, 0usize)];
        let mut path: Vec<usize> = Vec::new();
        loop {
            let (x, i) = *stack.last().expect("regular bipartite graphs have perfect matchings");
            if i == out[x].len() {
                stack.pop();
                path.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let id = out[x][i];
            let w = arcs[id].1;
            if !alive[id] || seen[w] == stamp {
                continue;
            }
            seen[w] = stamp;
            path.push(id);
            if by_head[w] == NONE {
                for &a in &path {
                    by_tail[arcs[a].0] = a;
                    by_head[arcs[a].1] = a;
                }
                break;
            }
            stack.push((arcs[by_head[w]].0, 0));
        }
    }
    by_tail
}

/// Labels factor `i` with `x_{i+1}`.
pub fn label_immersion(n: usize, factors: &[Vec<Arc>]) -> Result<LabeledGraph> {
    let edges = factors
        .iter()
        .enumerate()
        .flat_map(|(label, f)| f.iter().map(move |&(tail, head)| LabeledEdge { tail, head, label }))
        .collect();
    LabeledGraph::new(n, factors.len(), edges)
}

/// Keeps one labelled edge for each edge of `original`, matched by
/// endpoints. Any subgraph of an immersion is an immersion.
pub fn restrict_labels(labeled: &LabeledGraph, original: &MultiGraph) -> Result<LabeledGraph> {
    let mut pool: HashMap<(usize, usize), Vec<LabeledEdge>> = HashMap::new();
    for e in labeled.edges().iter().rev() {
        pool.entry((e.tail.min(e.head), e.tail.max(e.head))).or_default().push(*e);
    }
    let edges = original
        .edges()
        .into_iter()
        .map(|(u, v)| {
            pool.get_mut(&(u, v)).and_then(Vec::pop).ok_or_else(|| {
                Error::Precondition(format!("edge {u}-{v} is not in the labelled graph"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledGraph::new(labeled.n(), labeled.r(), edges)
}

/// Completion, factorization, labelling and restriction in one go: an
/// immersion of `g` onto the bouquet of `r` circles.
pub fn immerse(g: &MultiGraph, r: usize) -> Result<LabeledGraph> {
    let full = complete_to_regular(g, r)?;
    let factors = two_factorize(&full)?;
    let labeled = label_immersion(full.n(), &factors)?;
    restrict_labels(&labeled, g)
}
