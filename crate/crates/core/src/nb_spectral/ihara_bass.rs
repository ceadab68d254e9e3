//! Dense small-instance oracle for `λ₁(B)` through the Ihara–Bass identity
//!
//! ```text
//! det(I − uB) = (1 − u²)^{|E|−|V|} · det(I − uA + u²(D − I)).
//! ```
//!
//! `M(u) = I − uA + u²(D − I)` is symmetric and equals `I` at `u = 0`, so it
//! stays positive definite up to its first singular point `u* = 1/λ₁`. The
//! oracle scans `[1/(d_max − 1), 1]` with Cholesky as the definiteness test
//! and bisects the first failure. When `M(u)` stays definite all the way to
//! 1 the graph is a disjoint union of cycles and `λ₁ = 1`.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};
use crate::graph::Graph;

const MAX_VERTICES: usize = 2000;
const SCAN_STEPS: usize = 512;

pub fn ihara_bass_oracle(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n > MAX_VERTICES {
        return Err(Error::Oracle(format!("{n} vertices exceeds the dense limit {MAX_VERTICES}")));
    }
    if n == 0 || g.min_degree() < 2 {
        return Err(Error::Oracle("needs a non-empty graph of minimum degree 2".into()));
    }
    let mut adj = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        adj[(u, v)] += 1.0;
        adj[(v, u)] += 1.0;
    }
    let degree: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    let definite = |u: f64| {
        let mut m = adj.scale(-u);
        for v in 0..n {
            m[(v, v)] += 1.0 + u * u * (degree[v] - 1.0);
        }
        Cholesky::new(m).is_some()
    };

    if g.max_degree() == 2 {
        return Ok(1.0);
    }
    let d_max = g.max_degree() as f64;
    // λ₁ ≤ d_max − 1, so u* ≥ 1/(d_max − 1).
    let start = (1.0 / (d_max - 1.0)) * (1.0 - 1e-9);
    if !definite(start) {
        return Err(Error::Oracle(format!("M(u) not definite at u = {start}")));
    }
    let step = (1.0 - start) / SCAN_STEPS as f64;
    let mut lo = start;
    let mut hi = None;
    for i in 1..SCAN_STEPS {
        let u = start + step * i as f64;
        if definite(u) {
            lo = u;
        } else {
            hi = Some(u);
            break;
        }
    }
    let Some(mut hi) = hi else {
        // Definite on [0, 1): the only singular point is u = 1.
        return Ok(1.0);
    };
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if definite(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(2.0 / (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use approx::assert_abs_diff_eq;

    #[test]
    fn named_graphs() {
        assert_abs_diff_eq!(ihara_bass_oracle(&named::complete(4)).unwrap(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ihara_bass_oracle(&named::cycle(5)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ihara_bass_oracle(&named::petersen()).unwrap(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            ihara_bass_oracle(&named::complete_bipartite(2, 3)).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(ihara_bass_oracle(&named::complete(7)).unwrap(), 5.0, epsilon = 1e-10);
    }

    #[test]
    fn rejects_low_degree() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(ihara_bass_oracle(&path), Err(Error::Oracle(_))));
    }

    #[test]
    fn agrees_with_dense_nb_spectrum() {
        use crate::nb_spectral::NBOperator;
        // a few irregular graphs: K4 plus a pendant triangle, a wheel, a theta
        let graphs = [
            Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 3)])
                .unwrap(),
            Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])
                .unwrap(),
            Graph::from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap(),
        ];
        for g in &graphs {
            let dense = NBOperator::new(g).unwrap().to_dense();
            let shifted = &dense + DMatrix::identity(dense.nrows(), dense.ncols()) * 0.37;
            let radius = nalgebra::Schur::try_new(shifted, f64::EPSILON, 100_000)
                .expect("Schur converges")
                .complex_eigenvalues()
                .iter()
                .map(|z| (z - 0.37).norm())
                .fold(0.0, f64::max);
            assert_abs_diff_eq!(ihara_bass_oracle(g).unwrap(), radius, epsilon = 1e-8);
        }
    }
}
