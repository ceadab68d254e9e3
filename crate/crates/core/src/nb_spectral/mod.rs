//! The non-backtracking operator and its spectral quantities.
//!
//! Rows and columns are indexed by half-edges. Half-edge `e` at vertex `u`
//! matched to `σ(e)` at `v` stands for the directed edge `u → v`; its
//! reversal is `σ(e)`. `B[e, f] = 1` iff `f` is a half-edge at `v` other
//! than `σ(e)`. On a simple graph this is the usual matrix on directed edges
//! (`B[(u,v),(v,w)] = 1` iff `w ≠ u`); on a multigraph it is the product of
//! the matching matrix and the "same vertex, different slot" matrix, so a
//! loop can be followed by itself.

mod ihara_bass;
mod power;
mod walks;

pub use ihara_bass::ihara_bass_oracle;
pub use power::{power_iterate, power_iterate_with, PowerConfig, SpectralRecord, SpectralResult};
pub use walks::{growth_rate_estimate, prop51_diagnostics, walk_counts, Prop51, WalkCounts};

use crate::error::{Error, Result};
use crate::graph::{HalfEdge, MultiGraph};
use crate::par::Exec;

#[derive(Debug, Clone)]
pub struct NBOperator {
    offsets: Vec<usize>,
    vertex_of: Vec<u32>,
    partner: Vec<u32>,
}

impl NBOperator {
    /// Fails on vertices of degree below 2, whose incoming edges would have
    /// no continuation.
    pub fn new(g: &MultiGraph) -> Result<Self> {
        if let Some(v) = (0..g.n()).find(|&v| g.degree(v) < 2) {
            return Err(Error::Graph(format!(
                "vertex {v} has degree {} < 2",
                g.degree(v)
            )));
        }
        Ok(Self {
            offsets: g.offsets().to_vec(),
            vertex_of: g.vertex_index().to_vec(),
            partner: g.partners().to_vec(),
        })
    }

    /// Number of directed edges, `2|E|`.
    pub fn dim(&self) -> usize {
        self.partner.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn reverse(&self, e: HalfEdge) -> HalfEdge {
        self.partner[e] as usize
    }

    #[inline]
    pub fn tail(&self, e: HalfEdge) -> usize {
        self.vertex_of[e] as usize
    }

    #[inline]
    pub fn head(&self, e: HalfEdge) -> usize {
        self.vertex_of[self.partner[e] as usize] as usize
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Directed edges `f` with `B[e, f] = 1`.
    pub fn successors(&self, e: HalfEdge) -> impl Iterator<Item = HalfEdge> + '_ {
        let back = self.reverse(e);
        let v = self.head(e);
        (self.offsets[v]..self.offsets[v + 1]).filter(move |&f| f != back)
    }

    /// `deg(head(e)) − 1` per directed edge.
    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.dim()).map(|e| self.degree(self.head(e)) - 1).collect()
    }

    /// `χ`: all ones.
    pub fn chi(&self) -> Vec<f64> {
        vec![1.0; self.dim()]
    }

    /// `ψ̃_e = deg(tail(e)) − 1`.
    pub fn psi_tilde(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|e| (self.degree(self.tail(e)) - 1) as f64)
            .collect()
    }

    /// `out = B x`, using `(Bx)_e = Σ_{f at head(e)} x_f − x_{σ(e)}`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.apply_with(Exec::Parallel, x, out)
    }

    pub fn apply_with(&self, exec: Exec, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        let mut at_vertex = vec![0.0; self.vertex_count()];
        exec.fill(&mut at_vertex, |v| {
            x[self.offsets[v]..self.offsets[v + 1]].iter().sum::<f64>()
        });
        exec.fill(out, |e| {
            let back = self.partner[e] as usize;
            at_vertex[self.vertex_of[back] as usize] - x[back]
        });
    }

    /// `out = Bᵀ y`, using `(Bᵀy)_f = Σ_{g at tail(f)} y_{σ(g)} − y_{σ(f)}`.
    pub fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        self.apply_transpose_with(Exec::Parallel, y, out)
    }

    pub fn apply_transpose_with(&self, exec: Exec, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        let mut into_vertex = vec![0.0; self.vertex_count()];
        exec.fill(&mut into_vertex, |v| {
            (self.offsets[v]..self.offsets[v + 1])
                .map(|g| y[self.partner[g] as usize])
                .sum::<f64>()
        });
        exec.fill(out, |f| {
            into_vertex[self.vertex_of[f] as usize] - y[self.partner[f] as usize]
        });
    }

    /// Relabels a vector by edge reversal, `z̃_e = z_{σ(e)}`.
    pub fn reversed(&self, z: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|e| z[self.reverse(e)]).collect()
    }

    /// Dense matrix, for small-instance checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for e in 0..n {
            for f in self.successors(e) {
                m[(e, f)] += 1.0;
            }
        }
        m
    }
}
