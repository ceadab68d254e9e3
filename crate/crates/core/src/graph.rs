//! Half-edge multigraphs.
//!
//! Vertex `v` owns the half-edges `offsets[v]..offsets[v+1]`; slot `j` of `v`
//! is half-edge `offsets[v] + j`. The edge set is a fixed-point-free
//! involution `partner` on half-edges. A loop is two half-edges of the same
//! vertex matched to each other and adds 2 to its degree.
//!
//! Text format: a header line `n m`, then `m` lines `u v` with `u ≤ v`,
//! sorted lexicographically. Loops are written `u u`; parallel edges are
//! repeated.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::degree_model::DegreeSequence;
use crate::error::{Error, Result};

pub type HalfEdge = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    offsets: Vec<usize>,
    vertex_of: Vec<u32>,
    partner: Vec<u32>,
}

impl MultiGraph {
    /// Builds the graph of a matching on the half-edges of `seq`.
    pub fn from_matching(seq: &DegreeSequence, partner: Vec<u32>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(seq.n() + 1);
        offsets.push(0);
        for &d in seq.degrees() {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        if partner.len() != total {
            return Err(Error::Graph(format!(
                "matching has {} entries for {total} half-edges",
                partner.len()
            )));
        }
        for (h, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= total || p == h || partner[p] as usize != h {
                return Err(Error::Graph(format!(
                    "half-edge {h}: partner {p} is not a fixed-point-free involution"
                )));
            }
        }
        Ok(Self::assemble(offsets, partner))
    }

    /// Builds from an edge list. Slots are assigned in edge order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut next = offsets[..n].to_vec();
        let mut partner = vec![0u32; *offsets.last().unwrap()];
        for &(u, v) in edges {
            let hu = next[u];
            next[u] += 1;
            let hv = next[v];
            next[v] += 1;
            partner[hu] = hv as u32;
            partner[hv] = hu as u32;
        }
        Ok(Self::assemble(offsets, partner))
    }

    fn assemble(offsets: Vec<usize>, partner: Vec<u32>) -> Self {
        let mut vertex_of = vec![0u32; partner.len()];
        for (v, w) in offsets.windows(2).enumerate() {
            vertex_of[w[0]..w[1]].fill(v as u32);
        }
        Self {
            offsets,
            vertex_of,
            partner,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of edges, loops included.
    pub fn m(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn half_edge_count(&self) -> usize {
        self.partner.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn half_edges(&self, v: usize) -> std::ops::Range<HalfEdge> {
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn vertex_of(&self, h: HalfEdge) -> usize {
        self.vertex_of[h] as usize
    }

    #[inline]
    pub fn partner(&self, h: HalfEdge) -> HalfEdge {
        self.partner[h] as usize
    }

    /// Slot of `h` at its vertex, 0-based.
    pub fn slot(&self, h: HalfEdge) -> usize {
        h - self.offsets[self.vertex_of(h)]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn vertex_index(&self) -> &[u32] {
        &self.vertex_of
    }

    pub fn partners(&self) -> &[u32] {
        &self.partner
    }

    /// Neighbours of `v` with multiplicity; a loop lists `v` twice.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.half_edges(v).map(move |h| self.vertex_of(self.partner(h)))
    }

    /// Each edge once as `(u, v)` with `u ≤ v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.partner.len())
            .filter(|&h| h < self.partner(h))
            .map(|h| {
                let (u, v) = (self.vertex_of(h), self.vertex_of(self.partner(h)));
                (u.min(v), u.max(v))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::from_degrees(self.degrees()).expect("half-edge count is even")
    }

    /// No loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = vec![usize::MAX; self.n()];
        for v in 0..self.n() {
            for w in self.neighbors(v) {
                if w == v || seen[w] == v {
                    return false;
                }
                seen[w] = v;
            }
        }
        true
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n()];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().1 == 1
    }

    /// Induced subgraph on `vertices` (kept in the given order) and the map
    /// old id → new id.
    pub fn induced(&self, vertices: &[usize]) -> (MultiGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            map[v] = Some(i);
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter_map(|(u, v)| Some((map[u]?, map[v]?)))
            .collect();
        let g = MultiGraph::from_edges(vertices.len(), &edges).expect("ids in range");
        (g, map)
    }

    /// The component with the most vertices (lowest label on ties).
    pub fn largest_component(&self) -> MultiGraph {
        let (label, count) = self.components();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
        let vertices: Vec<usize> = (0..self.n()).filter(|&v| label[v] == best).collect();
        self.induced(&vertices).0
    }

    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let mut s = String::with_capacity(16 * (edges.len() + 1));
        writeln!(s, "{} {}", self.n(), edges.len()).unwrap();
        for (u, v) in edges {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map(|l| !l.trim().is_empty()).unwrap_or(true));
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header = header?;
        let nums = parse_ints(&header, 1)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse { line: 1, msg: "header must be `n m`".into() });
        };
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            let nums = parse_ints(&line, i + 1)?;
            let [u, v] = nums[..] else {
                return Err(Error::Parse { line: i + 1, msg: "expected `u v`".into() });
            };
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, &edges)
    }
}

pub(crate) fn parse_ints(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("not a non-negative integer: {t:?}"),
            })
        })
        .collect()
}

/// A multigraph known to have no loops and no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph(MultiGraph);

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::try_from(MultiGraph::from_edges(n, edges)?)
    }

    pub fn as_multi(&self) -> &MultiGraph {
        &self.0
    }

    pub fn into_multi(self) -> MultiGraph {
        self.0
    }
}

impl TryFrom<MultiGraph> for Graph {
    type Error = Error;

    fn try_from(g: MultiGraph) -> Result<Self> {
        if g.is_simple() {
            Ok(Self(g))
        } else {
            Err(Error::Graph("graph has loops or parallel edges".into()))
        }
    }
}

impl std::ops::Deref for Graph {
    type Target = MultiGraph;

    fn deref(&self) -> &MultiGraph {
        &self.0
    }
}

/// Small named graphs used across tests and examples.
pub mod named {
    use super::Graph;

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete_bipartite(p: usize, q: usize) -> Graph {
        let edges: Vec<_> = (0..p).flat_map(|u| (0..q).map(move |v| (u, p + v))).collect();
        Graph::from_edges(p + q, &edges).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges).unwrap()
    }

    /// Circulant graph on `n` vertices joining `i` to `i ± s` for each step.
    pub fn circulant(n: usize, steps: &[usize]) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for &s in steps {
                edges.push((i, (i + s) % n));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }
}
