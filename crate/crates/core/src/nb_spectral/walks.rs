//! Walk counts and the quantities built from them.

use serde::Serialize;

use super::NBOperator;

/// `S[t] = Bᵗχ` (walks of length `t` that start with each directed edge) and
/// `T[t] = (Bᵀ)ᵗψ̃`, for `t = 0..=t_max`.
#[derive(Debug, Clone)]
pub struct WalkCounts {
    pub s: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
}

pub fn walk_counts(op: &NBOperator, t_max: usize) -> WalkCounts {
    let mut s = vec![op.chi()];
    let mut t = vec![op.psi_tilde()];
    for k in 0..t_max {
        let mut next_s = vec![0.0; op.dim()];
        op.apply(&s[k], &mut next_s);
        let mut next_t = vec![0.0; op.dim()];
        op.apply_transpose(&t[k], &mut next_t);
        s.push(next_s);
        t.push(next_t);
    }
    WalkCounts { s, t }
}

/// Growth rate of `Σ_e (Bᵗχ)_e`, read off as `exp(slope)` of a least-squares
/// line through `ln Σ_e (Bᵗχ)_e` over `t ∈ [⌈depth/2⌉, depth]`.
///
/// The ball sizes of the universal cover grow at the same rate, so this is an
/// estimate of `λ₁` that shares nothing with power iteration beyond the
/// matvec.
pub fn growth_rate_estimate(op: &NBOperator, depth: usize) -> f64 {
    assert!(depth >= 2, "depth must be at least 2");
    let mut x = op.chi();
    let mut y = vec![0.0; op.dim()];
    let mut log_scale = 0.0;
    let mut logs = Vec::with_capacity(depth + 1);
    logs.push((op.dim() as f64).ln());
    for _ in 0..depth {
        op.apply(&x, &mut y);
        let total: f64 = y.iter().sum();
        log_scale += total.ln();
        logs.push(log_scale);
        std::mem::swap(&mut x, &mut y);
        x.iter_mut().for_each(|v| *v /= total);
    }
    // logs[t] = ln Σ Bᵗχ − ln(2|E|) for t ≥ 1; the offset does not move the slope.
    let from = depth.div_ceil(2).max(1);
    let points: Vec<(f64, f64)> = (from..=depth).map(|t| (t as f64, logs[t])).collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

/// Norm ratio and alignment of `y = (Bᵀ)^ℓψ̃` under `B^ℓ`.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Prop51 {
    pub ell: usize,
    /// `‖B^ℓ y‖ / ‖y‖`.
    pub ratio: f64,
    /// `|⟨B^ℓ y, y⟩| / (‖B^ℓ y‖ ‖y‖)`.
    pub cosine: f64,
}

pub fn prop51_diagnostics(op: &NBOperator, ell: usize) -> Prop51 {
    let mut y = op.psi_tilde();
    let mut tmp = vec![0.0; op.dim()];
    for _ in 0..ell {
        op.apply_transpose(&y, &mut tmp);
        std::mem::swap(&mut y, &mut tmp);
        let n = norm(&y);
        y.iter_mut().for_each(|v| *v /= n);
    }
    let ny = norm(&y);
    let mut z = y.clone();
    for _ in 0..ell {
        op.apply(&z, &mut tmp);
        std::mem::swap(&mut z, &mut tmp);
    }
    let nz = norm(&z);
    let dot: f64 = z.iter().zip(&y).map(|(a, b)| a * b).sum();
    Prop51 {
        ell,
        ratio: nz / ny,
        cosine: dot.abs() / (nz * ny),
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named, MultiGraph};
    use approx::assert_abs_diff_eq;

    /// Explicit depth-first enumeration of non-backtracking walks.
    fn enumerate_walks(op: &NBOperator, e: usize, len: usize) -> usize {
        if len == 0 {
            return 1;
        }
        op.successors(e).map(|f| enumerate_walks(op, f, len - 1)).sum()
    }

    #[test]
    fn regular_tree_counts() {
        let op = NBOperator::new(&named::circulant(60, &[1, 11])).unwrap();
        let w = walk_counts(&op, 3);
        for t in 0..=3 {
            assert!(w.s[t].iter().all(|&c| c == 3f64.powi(t as i32)));
        }
    }

    #[test]
    fn triangle_counts_are_one() {
        let op = NBOperator::new(&named::cycle(3)).unwrap();
        let w = walk_counts(&op, 6);
        assert!(w.s.iter().flatten().all(|&c| c == 1.0));
    }

    #[test]
    fn counts_match_enumeration_and_reversal_identity() {
        // mixed degrees: a tree-like core with cycles far apart
        let g = MultiGraph::from_edges(
            10,
            &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9),
              (4, 5), (6, 7), (8, 9), (4, 9), (5, 6), (7, 8)],
        )
        .unwrap();
        let op = NBOperator::new(&g).unwrap();
        let w = walk_counts(&op, 5);
        for t in 0..=5 {
            for e in 0..op.dim() {
                assert_eq!(w.s[t][e] as usize, enumerate_walks(&op, e, t));
                if t < 5 {
                    // T_t(f) = S_{t+1}(σ(f))
                    assert_eq!(w.t[t][e], w.s[t + 1][op.reverse(e)]);
                }
            }
        }
    }

    #[test]
    fn growth_rate_examples() {
        let g = named::circulant(40, &[1, 7]);
        let op = NBOperator::new(&g).unwrap();
        assert_abs_diff_eq!(growth_rate_estimate(&op, 20), 3.0, epsilon = 1e-9);
        let op = NBOperator::new(&named::cycle(9)).unwrap();
        assert_abs_diff_eq!(growth_rate_estimate(&op, 20), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn prop51_on_regular_graphs() {
        for (g, d) in [(named::petersen(), 3), (named::circulant(30, &[1, 4]), 4)] {
            let op = NBOperator::new(&g).unwrap();
            for ell in 0..5 {
                let p = prop51_diagnostics(&op, ell);
                assert_abs_diff_eq!(p.ratio, ((d - 1) as f64).powi(ell as i32), epsilon = 1e-9);
                assert_abs_diff_eq!(p.cosine, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn prop51_ell_zero_is_identity() {
        let op = NBOperator::new(&named::complete_bipartite(2, 4)).unwrap();
        let p = prop51_diagnostics(&op, 0);
        assert_eq!((p.ratio, (p.cosine - 1.0).abs() < 1e-15), (1.0, true));
    }
}
