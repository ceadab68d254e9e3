//! The unimodular Galton-Watson process.
//!
//! The root draws its number of children from `P`, every later vertex from
//! the size-biased offspring law `P̄`. `Z_t` is the size of generation `t`;
//! `Z_t / aᵗ` (for `t ≥ 1`, up to the factor `b/a`) is a positive martingale
//! whose limit `Z_∞` sets the scale of every quantity in this module.

mod q_functional;
mod stats;
mod tree;

pub use q_functional::{
    q_brute_force, q_convergence_study, q_decomposition, simulate_q, QRow, QSample, QStudy,
};
pub use stats::{
    concentration_check, martingale_residuals, shuffle_generations, tail_bound_check,
    tail_bound_grid, ConcentrationPoint, MartingaleStats, SlopeEstimate, TailEstimate,
    MIN_TRAJECTORIES,
};
pub use tree::GwTree;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::degree_model::{DegreeDistribution, DiscreteLaw, LawSampler};
use crate::error::{Error, Result};
use crate::{par, seed};

/// Offspring law of the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RootLaw {
    /// The degree law itself (the unimodular tree).
    #[default]
    P,
    /// The size-biased law `P̄`, as for every other vertex.
    SizeBiased,
    /// A fixed number of children.
    Fixed(usize),
}

impl RootLaw {
    fn validate(self, dist: &DegreeDistribution) -> Result<()> {
        match self {
            RootLaw::Fixed(k) if k < dist.k_min() => Err(Error::Precondition(format!(
                "root must have at least k_min = {} children, got {k}",
                dist.k_min()
            ))),
            _ => Ok(()),
        }
    }

    /// Range of possible `Z_1`.
    fn first_generation(self, dist: &DegreeDistribution) -> (u64, u64) {
        match self {
            RootLaw::P => (dist.k_min() as u64, dist.k_max() as u64),
            RootLaw::SizeBiased => (dist.k_min() as u64 - 1, dist.k_max() as u64 - 1),
            RootLaw::Fixed(k) => (k as u64, k as u64),
        }
    }
}

/// Generation sizes `Z_0 = 1, Z_1, …, Z_t`, optionally with the tree.
#[derive(Debug, Clone, Serialize)]
pub struct GWTrajectory {
    pub z: Vec<u64>,
    #[serde(skip)]
    pub tree: Option<GwTree>,
}

impl GWTrajectory {
    pub fn t_max(&self) -> usize {
        self.z.len() - 1
    }

    /// Deterministic range of `Z_t`: the root contributes its range, every
    /// later generation multiplies by `k_min−1 ..= k_max−1`.
    pub fn bounds(dist: &DegreeDistribution, root: RootLaw, t: usize) -> (u64, u64) {
        if t == 0 {
            return (1, 1);
        }
        let (lo1, hi1) = root.first_generation(dist);
        let e = (t - 1) as u32;
        (
            lo1 * (dist.k_min() as u64 - 1).pow(e),
            hi1 * (dist.k_max() as u64 - 1).pow(e),
        )
    }

    pub fn within_bounds(&self, dist: &DegreeDistribution, root: RootLaw) -> bool {
        self.z.iter().enumerate().all(|(t, &z)| {
            let (lo, hi) = Self::bounds(dist, root, t);
            lo <= z && z <= hi
        })
    }
}

/// Advances a generation of `z` vertices that each draw from `law`.
///
/// Small generations draw every vertex. Large ones draw the multinomial
/// vector of offspring counts one binomial at a time, which has the same
/// law and costs `O(|support|)`.
pub(crate) struct Stepper {
    law: DiscreteLaw,
    sampler: LawSampler,
}

const DIRECT_LIMIT: u64 = 32;

impl Stepper {
    pub(crate) fn new(law: DiscreteLaw) -> Self {
        let sampler = law.sampler();
        Self { law, sampler }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }

    pub(crate) fn step<R: Rng + ?Sized>(&self, z: u64, rng: &mut R) -> u64 {
        if z <= DIRECT_LIMIT {
            return (0..z).map(|_| self.sampler.sample(rng) as u64).sum();
        }
        let mut remaining = z;
        let mut mass_left = 1.0;
        let mut total = 0;
        let support: Vec<(usize, f64)> = self.law.iter().filter(|&(_, p)| p > 0.0).collect();
        for (i, &(k, p)) in support.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let count = if i + 1 == support.len() {
                remaining
            } else {
                let q = (p / mass_left).clamp(0.0, 1.0);
                Binomial::new(remaining, q)
                    .expect("binomial parameters are valid")
                    .sample(rng)
            };
            total += k as u64 * count;
            remaining -= count;
            mass_left -= p;
        }
        total
    }
}

/// One trajectory `Z_0..=Z_{t_max}`.
pub fn simulate_z(
    dist: &DegreeDistribution,
    t_max: usize,
    seed: u64,
    root: RootLaw,
) -> Result<GWTrajectory> {
    root.validate(dist)?;
    let stepper = Stepper::new(dist.offspring_distribution());
    let root_sampler = dist.law().sampler();
    simulate_with(&stepper, &root_sampler, t_max, root, &mut seed::rng(seed))
}

fn simulate_with<R: Rng + ?Sized>(
    stepper: &Stepper,
    root_sampler: &LawSampler,
    t_max: usize,
    root: RootLaw,
    rng: &mut R,
) -> Result<GWTrajectory> {
    if t_max < 1 {
        return Err(Error::Precondition("t_max must be at least 1".into()));
    }
    let mut z = Vec::with_capacity(t_max + 1);
    z.push(1);
    z.push(match root {
        RootLaw::P => root_sampler.sample(rng) as u64,
        RootLaw::SizeBiased => stepper.draw(rng) as u64,
        RootLaw::Fixed(k) => k as u64,
    });
    for t in 1..t_max {
        let next = stepper.step(z[t], rng);
        z.push(next);
    }
    Ok(GWTrajectory { z, tree: None })
}

/// `n_runs` independent trajectories; run `i` uses seed `split(master, i)`.
pub fn simulate_many(
    dist: &DegreeDistribution,
    t_max: usize,
    master_seed: u64,
    n_runs: usize,
    root: RootLaw,
) -> Result<Vec<GWTrajectory>> {
    root.validate(dist)?;
    if t_max < 1 {
        return Err(Error::Precondition("t_max must be at least 1".into()));
    }
    let stepper = Stepper::new(dist.offspring_distribution());
    let root_sampler = dist.law().sampler();
    par::map_indexed(n_runs, |i| {
        let mut rng = seed::stream(master_seed, i as u64);
        simulate_with(&stepper, &root_sampler, t_max, root, &mut rng)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::solve_two_point;

    #[test]
    fn regular_is_deterministic() {
        for d in [3usize, 4, 5] {
            let dist = DegreeDistribution::regular(d).unwrap();
            let traj = simulate_z(&dist, 10, 9, RootLaw::P).unwrap();
            for t in 1..=10 {
                assert_eq!(traj.z[t], d as u64 * (d as u64 - 1).pow(t as u32 - 1));
            }
        }
    }

    #[test]
    fn fixed_root_below_k_min_is_rejected() {
        let dist = solve_two_point(2, 2.0).unwrap();
        assert!(matches!(
            simulate_z(&dist, 5, 1, RootLaw::Fixed(1)),
            Err(Error::Precondition(_))
        ));
        assert!(simulate_z(&dist, 0, 1, RootLaw::P).is_err());
    }

    #[test]
    fn seeds_reproduce() {
        let dist = solve_two_point(2, 2.0).unwrap();
        let a = simulate_z(&dist, 12, 5, RootLaw::P).unwrap();
        let b = simulate_z(&dist, 12, 5, RootLaw::P).unwrap();
        assert_eq!(a.z, b.z);
        let many = simulate_many(&dist, 12, 5, 4, RootLaw::P).unwrap();
        let again = simulate_many(&dist, 12, 5, 4, RootLaw::P).unwrap();
        assert!(many.iter().zip(&again).all(|(x, y)| x.z == y.z));
    }

    #[test]
    fn bounds_hold_for_every_root_law() {
        let dist = DegreeDistribution::from_pairs(&[(2, 0.5), (3, 0.2), (5, 0.3)]).unwrap();
        for root in [RootLaw::P, RootLaw::SizeBiased, RootLaw::Fixed(4)] {
            for traj in simulate_many(&dist, 9, 3, 300, root).unwrap() {
                assert!(traj.within_bounds(&dist, root), "{root:?} {:?}", traj.z);
            }
        }
    }

    /// The binomial-chain step must have the multinomial mean and variance
    /// `z·Var(P̄)`, same as summing `z` direct draws.
    #[test]
    fn large_step_moments() {
        let dist = DegreeDistribution::from_pairs(&[(2, 0.5), (3, 0.2), (5, 0.3)]).unwrap();
        let law = dist.offspring_distribution();
        let (mean, var) = (law.mean(), law.variance());
        let stepper = Stepper::new(law);
        let mut rng = seed::rng(8);
        let z = 1000u64;
        let runs = 20_000;
        let draws: Vec<f64> = (0..runs).map(|_| stepper.step(z, &mut rng) as f64).collect();
        let m = draws.iter().sum::<f64>() / runs as f64;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let se = (z as f64 * var / runs as f64).sqrt();
        assert!((m - z as f64 * mean).abs() < 4.0 * se, "{m}");
        assert!((v / (z as f64 * var) - 1.0).abs() < 0.05, "{v}");
    }
}
