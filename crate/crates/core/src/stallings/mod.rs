//! From a graph to an explicit subgroup of the free group `F_r`.
//!
//! A graph with degrees at most `2r` is completed to a `2r`-regular
//! multigraph, whose edges split into `r` oriented 2-factors. Labelling
//! factor `i` with the generator `x_i` gives an immersion onto the bouquet
//! of `r` circles, and restricting back to the original edges keeps it an
//! immersion. Reading the loops at a basepoint then gives a free basis of a
//! subgroup `H ≤ F_r` whose growth rate is the `λ₁` of the graph.

mod basis;
mod factor;

pub use basis::{
    fold_words, free_reduce, subgroup_basis, subgroup_growth_certificate, GrowthCertificate,
    SubgroupBasis, Word,
};
pub use factor::{
    complete_to_regular, euler_orientation, immerse, label_immersion, restrict_labels,
    two_factorize, Arc,
};

use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{parse_ints, MultiGraph};

/// Directed edge `tail → head` carrying generator `x_{label+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LabeledEdge {
    pub tail: usize,
    pub head: usize,
    /// Zero-based: `0` stands for `x_1`.
    pub label: usize,
}

/// A directed graph with edge labels in `{x_1, …, x_r}` that satisfies the
/// immersion condition: at each vertex, each label leaves at most once and
/// arrives at most once. Checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    r: usize,
    edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    pub fn new(n: usize, r: usize, edges: Vec<LabeledEdge>) -> Result<Self> {
        let g = Self { n, r, edges };
        g.verify_immersion()?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// Checks labels and endpoints are in range and the immersion condition.
    pub fn verify_immersion(&self) -> Result<()> {
        let mut out = vec![false; self.n * self.r];
        let mut inc = vec![false; self.n * self.r];
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= self.n || e.head >= self.n || e.label >= self.r {
                return Err(Error::Immersion(format!("edge {i} is out of range: {e:?}")));
            }
            for (seen, v, what) in [(&mut out, e.tail, "leave"), (&mut inc, e.head, "enter")] {
                let slot = &mut seen[v * self.r + e.label];
                if *slot {
                    return Err(Error::Immersion(format!(
                        "two edges labelled x_{} {what} vertex {v}",
                        e.label + 1
                    )));
                }
                *slot = true;
            }
        }
        Ok(())
    }

    /// Every label leaves and enters every vertex exactly once, i.e. the
    /// map onto the bouquet is a covering.
    pub fn is_covering(&self) -> bool {
        self.edges.len() == self.n * self.r
    }

    /// The underlying undirected multigraph, edges in the same order.
    pub fn underlying(&self) -> MultiGraph {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.tail, e.head)).collect();
        MultiGraph::from_edges(self.n, &pairs).expect("endpoints are in range")
    }

    /// Header `n m r`, then one `u v i` line per edge `u → v` labelled `x_i`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.n, self.m(), self.r);
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.tail, e.head, e.label + 1));
        }
        s
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            rows.push((i + 1, parse_ints(line, i + 1)?));
        }
        let mut rows = rows.into_iter();
        let (hline, header) = rows.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let [n, m, r] = header[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be `n m r`".into(),
            });
        };
        let mut edges = Vec::with_capacity(m);
        for (line, row) in rows {
            match row[..] {
                [u, v, i] if i >= 1 => edges.push(LabeledEdge {
                    tail: u,
                    head: v,
                    label: i - 1,
                }),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: "expected `u v i` with i ≥ 1".into(),
                    })
                }
            }
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, r, edges)
    }
}
