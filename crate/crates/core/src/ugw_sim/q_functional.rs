//! The once-backtracking walk count `Q_ℓ`.
//!
//! `Q_ℓ` counts walks `v_0 = o, v_1, …, v_{2ℓ+2}` from the root that
//! backtrack exactly once, at `v_{ℓ−1} = v_{ℓ+1}`. Such a walk descends to
//! generation `ℓ`, turns back, climbs to some vertex `v` of generation
//! `t < ℓ`, switches to another child `u` of `v` and descends `t+2` steps.
//! Grouping by `v` and the two children `w ≠ u` involved gives
//!
//! ```text
//! Q_ℓ = Σ_{t<ℓ} Σ_{v ∈ gen t} Σ_{w ≠ u children of v} Z^{(w)}_{ℓ−t−1} Z^{(u)}_{t+1}
//! ```
//!
//! where `Z^{(w)}_j` counts the descendants of `w` `j` generations below it.
//! The deepest vertex such a walk reaches is in generation `2ℓ`.

use serde::Serialize;

use super::tree::GwTree;
use super::{GWTrajectory, RootLaw, Stepper};
use crate::degree_model::DegreeDistribution;
use crate::error::{Error, Result};
use crate::{par, seed};

/// Largest `ℓ` for which [`simulate_q`] also runs the brute-force count.
pub const BRUTE_FORCE_MAX_ELL: usize = 4;

/// `Q_ℓ` through the subtree-count decomposition. Needs generations down to
/// `2ℓ` and `ℓ` stored explicitly.
pub fn q_decomposition(tree: &GwTree, ell: usize) -> u128 {
    assert!(ell >= 1, "ell must be at least 1");
    assert!(ell <= tree.explicit_depth() && 2 * ell <= tree.depth());
    let mut q = 0u128;
    for t in 0..ell {
        // counts for the children of generation-t vertices
        let down_to_ell = tree.descendants(t + 1, ell);
        let down_further = tree.descendants(t + 1, 2 * t + 2);
        for v in 0..tree.generation_len(t) {
            let range = tree.child_range(t, v);
            let (mut sa, mut sb, mut sab) = (0u128, 0u128, 0u128);
            for c in range {
                let (x, y) = (down_to_ell[c] as u128, down_further[c] as u128);
                sa += x;
                sb += y;
                sab += x * y;
            }
            q += sa * sb - sab;
        }
    }
    q
}

/// `Q_ℓ` by walking every candidate path. Needs generations down to `2ℓ`
/// stored explicitly.
pub fn q_brute_force(tree: &GwTree, ell: usize) -> u128 {
    assert!(ell >= 1, "ell must be at least 1");
    assert!(2 * ell <= tree.explicit_depth(), "brute force needs an explicit tree of depth 2ℓ");
    let depth = tree.explicit_depth();
    // global ids: generation offsets, parents, child ranges
    let mut base = vec![0usize];
    for d in 0..=depth {
        base.push(base[d] + tree.generation_len(d));
    }
    let total = base[depth + 1];
    let mut parent = vec![usize::MAX; total];
    let mut kids: Vec<Range> = vec![(0, 0); total];
    for d in 0..depth {
        for i in 0..tree.generation_len(d) {
            let r = tree.child_range(d, i);
            let id = base[d] + i;
            kids[id] = (base[d + 1] + r.start, base[d + 1] + r.end);
            for c in r {
                parent[base[d + 1] + c] = id;
            }
        }
    }
    let walker = Walker {
        parent: &parent,
        kids: &kids,
        ell,
        len: 2 * ell + 2,
    };
    walker.count(0, usize::MAX, 0)
}

type Range = (usize, usize);

struct Walker<'a> {
    parent: &'a [usize],
    kids: &'a [Range],
    ell: usize,
    len: usize,
}

impl Walker<'_> {
    /// Walks from `cur` having arrived from `prev` after `step` moves.
    fn count(&self, cur: usize, prev: usize, step: usize) -> u128 {
        if step == self.len {
            return 1;
        }
        let (lo, hi) = self.kids[cur];
        let up = self.parent[cur];
        let mut total = 0;
        for next in (lo..hi).chain((up != usize::MAX).then_some(up)) {
            // moving to `prev` backtracks at position `step`
            let backtracks = step >= 1 && next == prev;
            if backtracks == (step == self.ell) {
                total += self.count(next, cur, step + 1);
            }
        }
        total
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QSample {
    pub ell: usize,
    pub q: u128,
    /// Brute-force count, present for `ℓ ≤ 4`.
    pub brute_force: Option<u128>,
    pub trajectory: GWTrajectory,
}

/// Grows a unimodular tree to generation `2ℓ` and evaluates `Q_ℓ`.
pub fn simulate_q(dist: &DegreeDistribution, ell: usize, seed: u64) -> Result<QSample> {
    if ell < 1 {
        return Err(Error::Precondition("ell must be at least 1".into()));
    }
    let small = ell <= BRUTE_FORCE_MAX_ELL;
    let explicit = if small { 2 * ell } else { ell };
    let tree = GwTree::grow(dist, RootLaw::P, explicit, 2 * ell, seed)?;
    let q = q_decomposition(&tree, ell);
    let brute_force = small.then(|| q_brute_force(&tree, ell));
    Ok(QSample {
        ell,
        q,
        brute_force,
        trajectory: GWTrajectory {
            z: tree.z(),
            tree: Some(tree),
        },
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct QRow {
    pub ell: usize,
    /// Mean of `Q_ℓ / a^{2ℓ}`.
    pub mean: f64,
    pub stderr: f64,
    /// `mean / mean(Z_T / a^T)`.
    pub ratio: f64,
    /// Mean of `(Q_ℓ / a^{2ℓ})²`.
    pub second_moment: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct QStudy {
    pub ell_max: usize,
    pub n_runs: usize,
    pub seed: u64,
    /// Depth `T` of the `Z_∞ ≈ Z_T / a^T` proxy.
    pub t_inf: usize,
    pub z_inf_mean: f64,
    pub z_inf_stderr: f64,
    pub rows: Vec<QRow>,
    /// Relative change of `ratio` between the last two `ℓ`.
    pub relative_change: f64,
    pub plateau: bool,
    /// First and second normalized moments grow by at most 25% between the
    /// last two `ℓ`.
    pub moments_bounded: bool,
}

pub const PLATEAU_TOL: f64 = 0.05;
const MOMENT_GROWTH: f64 = 1.25;

/// Samples `n_runs` trees and tabulates `Q_ℓ / a^{2ℓ}` for `ℓ = 1..=ell_max`
/// against the `Z_∞` proxy `Z_T / a^T`, `T = ell_max + 4`.
pub fn q_convergence_study(
    dist: &DegreeDistribution,
    ell_max: usize,
    n_runs: usize,
    seed: u64,
) -> Result<QStudy> {
    if ell_max < 4 {
        return Err(Error::Precondition(format!("ell_max must be at least 4, got {ell_max}")));
    }
    if n_runs < 2 {
        return Err(Error::Precondition("need at least two runs".into()));
    }
    let a = dist.branching_factor();
    let t_inf = ell_max + 4;
    let depth = (2 * ell_max).max(t_inf);
    let stepper = Stepper::new(dist.offspring_distribution());
    let root_sampler = dist.law().sampler();

    // per run: Q_ℓ / a^{2ℓ} for ℓ = 1..=ell_max, then Z_T / a^T
    let runs: Vec<Vec<f64>> = par::map_indexed(n_runs, |i| {
        let mut rng = seed::stream(seed, i as u64);
        let tree = GwTree::grow_with(&stepper, &root_sampler, RootLaw::P, ell_max, depth, &mut rng)
            .expect("depths are valid");
        let mut out: Vec<f64> = (1..=ell_max)
            .map(|ell| q_decomposition(&tree, ell) as f64 / a.powi(2 * ell as i32))
            .collect();
        out.push(tree.descendants(0, t_inf)[0] as f64 / a.powi(t_inf as i32));
        out
    });

    let column = |j: usize| runs.iter().map(move |r| r[j]);
    let (z_inf_mean, z_inf_stderr) = mean_and_stderr(column(ell_max));
    let rows: Vec<QRow> = (1..=ell_max)
        .map(|ell| {
            let (mean, stderr) = mean_and_stderr(column(ell - 1));
            QRow {
                ell,
                mean,
                stderr,
                ratio: mean / z_inf_mean,
                second_moment: column(ell - 1).map(|x| x * x).sum::<f64>() / n_runs as f64,
            }
        })
        .collect();
    let (last, prev) = (&rows[ell_max - 1], &rows[ell_max - 2]);
    let relative_change = (last.ratio - prev.ratio).abs() / prev.ratio;
    Ok(QStudy {
        ell_max,
        n_runs,
        seed,
        t_inf,
        z_inf_mean,
        z_inf_stderr,
        plateau: relative_change < PLATEAU_TOL,
        moments_bounded: last.mean <= MOMENT_GROWTH * prev.mean
            && last.second_moment <= MOMENT_GROWTH * prev.second_moment,
        rows,
        relative_change,
    })
}

fn mean_and_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::solve_two_point;

    #[test]
    fn regular_q1() {
        for d in [3u128, 4, 5] {
            let dist = DegreeDistribution::regular(d as usize).unwrap();
            let s = simulate_q(&dist, 1, 0).unwrap();
            assert_eq!(s.q, d * (d - 1) * (d - 1));
            assert_eq!(s.brute_force, Some(s.q));
        }
    }

    #[test]
    fn regular_closed_form() {
        // Q_ℓ = d (d−1)^{2ℓ} on the d-regular tree
        let dist = DegreeDistribution::regular(3).unwrap();
        for ell in 1..=6 {
            let s = simulate_q(&dist, ell, 0).unwrap();
            assert_eq!(s.q, 3 * 2u128.pow(2 * ell as u32));
        }
    }

    #[test]
    fn two_regular_is_rejected() {
        assert!(DegreeDistribution::regular(2).is_err());
    }

    #[test]
    fn decomposition_matches_brute_force() {
        let dists = [
            solve_two_point(2, 2.0).unwrap(),
            DegreeDistribution::from_pairs(&[(2, 0.5), (3, 0.3), (5, 0.2)]).unwrap(),
        ];
        for dist in &dists {
            for s in 0..60 {
                for ell in 1..=4 {
                    let sample = simulate_q(dist, ell, s).unwrap();
                    assert_eq!(sample.brute_force, Some(sample.q), "seed {s} ell {ell}");
                }
            }
        }
    }

    #[test]
    fn tails_do_not_change_q() {
        let dist = solve_two_point(2, 2.0).unwrap();
        for s in 0..30 {
            let full = GwTree::grow(&dist, RootLaw::P, 8, 8, s).unwrap();
            for ell in 1..=4 {
                let brute = q_brute_force(&full, ell);
                for explicit in ell..=8 {
                    assert_eq!(q_decomposition(&full.collapsed(explicit), ell), brute);
                }
            }
        }
    }

    #[test]
    fn regular_study_is_flat() {
        let dist = DegreeDistribution::regular(4).unwrap();
        let study = q_convergence_study(&dist, 5, 10, 1).unwrap();
        let r0 = study.rows[0].ratio;
        assert!(study.rows.iter().all(|r| r.ratio == r0));
        assert_eq!(study.relative_change, 0.0);
        assert!(study.plateau && study.moments_bounded);
        assert!((r0 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn study_needs_ell_max_four() {
        let dist = solve_two_point(2, 2.0).unwrap();
        assert!(q_convergence_study(&dist, 3, 10, 1).is_err());
    }
}
