//! ℓ-tangle-freeness: every radius-ℓ ball carries at most one cycle.
//!
//! The ball around `v` is the subgraph induced by the vertices within
//! distance ℓ of `v`. It is connected, so its cycle rank is
//! `|E_ball| − |V_ball| + 1`. Loops and parallel edges count as cycles.

use std::collections::HashMap;

use crate::graph::MultiGraph;
use crate::par;

/// Cycle rank of the radius-`ell` ball around `v`.
pub fn ball_cycle_rank(g: &MultiGraph, v: usize, ell: usize) -> usize {
    let mut dist: HashMap<usize, usize> = HashMap::from([(v, 0)]);
    let mut layer = vec![v];
    for d in 1..=ell {
        let mut next = Vec::new();
        for &u in &layer {
            for w in g.neighbors(u) {
                dist.entry(w).or_insert_with(|| {
                    next.push(w);
                    d
                });
            }
        }
        layer = next;
    }
    // Each half-edge between two ball vertices is half an edge.
    let inner_half_edges: usize = dist
        .keys()
        .map(|&u| g.neighbors(u).filter(|w| dist.contains_key(w)).count())
        .sum();
    (inner_half_edges / 2 + 1).saturating_sub(dist.len())
}

pub fn tangle_free_check(g: &MultiGraph, ell: usize) -> bool {
    !par::any_indexed(g.n(), |v| ball_cycle_rank(g, v, ell) > 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::seed;
    use rand::Rng;

    #[test]
    fn cycles_are_tangle_free() {
        for n in 3..12 {
            for ell in 1..8 {
                assert!(tangle_free_check(&named::cycle(n), ell));
            }
        }
    }

    #[test]
    fn bowtie_is_tangled_at_radius_one() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(ball_cycle_rank(&g, 0, 1), 2);
        assert!(!tangle_free_check(&g, 1));
    }

    #[test]
    fn trees_are_tangle_free() {
        let g = MultiGraph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        for ell in 1..5 {
            assert!(tangle_free_check(&g, ell));
        }
    }

    #[test]
    fn loops_and_double_edges_count() {
        let g = MultiGraph::from_edges(2, &[(0, 0), (0, 1), (0, 1)]).unwrap();
        assert_eq!(ball_cycle_rank(&g, 0, 1), 2);
    }

    /// Independent route: all-pairs distances by Floyd–Warshall, then the
    /// cycle space dimension `|E| − |V| + c` of the induced ball with `c`
    /// from union-find.
    fn brute_rank(n: usize, edges: &[(usize, usize)], v: usize, ell: usize) -> usize {
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for &(a, b) in edges {
            if a != b {
                d[a][b] = 1;
                d[b][a] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let inside: Vec<bool> = (0..n).map(|u| d[v][u] <= ell).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut e = 0;
        for &(a, b) in edges {
            if inside[a] && inside[b] {
                e += 1;
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let vs = inside.iter().filter(|&&x| x).count();
        let comps = (0..n).filter(|&u| inside[u] && find(&mut parent, u) == u).count();
        e + comps - vs
    }

    #[test]
    fn agrees_with_brute_force_on_small_graphs() {
        let mut rng = seed::rng(77);
        for _ in 0..400 {
            let n = rng.random_range(1..=8);
            let m = rng.random_range(0..=12);
            let edges: Vec<(usize, usize)> =
                (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
            let g = MultiGraph::from_edges(n, &edges).unwrap();
            for ell in 1..=3 {
                for v in 0..n {
                    assert_eq!(ball_cycle_rank(&g, v, ell), brute_rank(n, &edges, v, ell));
                }
                let brute = (0..n).all(|v| brute_rank(n, &edges, v, ell) <= 1);
                assert_eq!(tangle_free_check(&g, ell), brute);
            }
        }
    }
}
