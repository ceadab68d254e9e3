//! Statistics over many trajectories: the martingale slope, the tail of
//! `max_k Z_k / aᵏ`, and the concentration of `Z_t` around `a^{t−s} Z_s`.

use rand::seq::SliceRandom;
use serde::Serialize;

use super::{simulate_many, GWTrajectory, RootLaw};
use crate::degree_model::DegreeDistribution;
use crate::error::{Error, Result};
use crate::seed;

/// Fewest trajectories accepted by [`martingale_residuals`].
pub const MIN_TRAJECTORIES: usize = 1000;

/// Two-sided 99% normal quantile.
const Z99: f64 = 2.575_829_303_548_901;

/// Least-squares slope of `Z_{t+1}` on `Z_t` through the origin.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct SlopeEstimate {
    /// Generation of the regressor; `None` for the pooled fit.
    pub t: Option<usize>,
    pub slope: f64,
    /// Heteroscedasticity-robust standard error.
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub pairs: usize,
}

impl SlopeEstimate {
    fn fit(t: Option<usize>, pairs: &[(f64, f64)]) -> Self {
        let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = pairs.iter().map(|(x, y)| x * y).sum();
        let slope = sxy / sxx;
        // sandwich variance Σ x² e² / (Σ x²)²
        let meat: f64 = pairs
            .iter()
            .map(|(x, y)| (x * (y - slope * x)).powi(2))
            .sum();
        let stderr = meat.sqrt() / sxx;
        Self {
            t,
            slope,
            stderr,
            ci_low: slope - Z99 * stderr,
            ci_high: slope + Z99 * stderr,
            pairs: pairs.len(),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        let slack = 1e-12 * value.abs();
        self.ci_low - slack <= value && value <= self.ci_high + slack
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MartingaleStats {
    pub a: f64,
    pub per_t: Vec<SlopeEstimate>,
    pub pooled: SlopeEstimate,
    /// Whether the pooled 99% interval contains `a`.
    pub contains_a: bool,
}

/// Regresses `Z_{t+1}` on `Z_t` for every `t ≥ 1`, separately and pooled.
/// Generation 0 is skipped because the root draws from `P`, whose mean is
/// `b` rather than `a`.
pub fn martingale_residuals(
    trajectories: &[GWTrajectory],
    dist: &DegreeDistribution,
) -> Result<MartingaleStats> {
    if trajectories.len() < MIN_TRAJECTORIES {
        return Err(Error::Statistics(format!(
            "{} trajectories, need at least {MIN_TRAJECTORIES}",
            trajectories.len()
        )));
    }
    let t_max = trajectories.iter().map(GWTrajectory::t_max).min().unwrap();
    if t_max < 2 {
        return Err(Error::Statistics("trajectories need at least two generations".into()));
    }
    let mut all = Vec::new();
    let per_t = (1..t_max)
        .map(|t| {
            let pairs: Vec<(f64, f64)> = trajectories
                .iter()
                .map(|tr| (tr.z[t] as f64, tr.z[t + 1] as f64))
                .collect();
            all.extend_from_slice(&pairs);
            SlopeEstimate::fit(Some(t), &pairs)
        })
        .collect();
    let pooled = SlopeEstimate::fit(None, &all);
    let a = dist.branching_factor();
    Ok(MartingaleStats {
        a,
        per_t,
        contains_a: pooled.contains(a),
        pooled,
    })
}

/// Negative control: permutes each generation `t ≥ 2` independently across
/// runs, which keeps every marginal law and destroys the dependence of
/// `Z_{t+1}` on `Z_t`.
pub fn shuffle_generations(trajectories: &[GWTrajectory], seed: u64) -> Vec<GWTrajectory> {
    let mut rng = seed::rng(seed);
    let mut out: Vec<GWTrajectory> = trajectories
        .iter()
        .map(|t| GWTrajectory { z: t.z.clone(), tree: None })
        .collect();
    let t_max = out.iter().map(GWTrajectory::t_max).min().unwrap_or(0);
    for t in 2..=t_max {
        let mut column: Vec<u64> = out.iter().map(|tr| tr.z[t]).collect();
        column.shuffle(&mut rng);
        for (tr, z) in out.iter_mut().zip(column) {
            tr.z[t] = z;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct TailEstimate {
    pub s: f64,
    pub k_range: usize,
    pub exceed: usize,
    pub n_runs: usize,
    /// Fraction of runs with `Z_k > aᵏ s` for some `1 ≤ k ≤ k_range`.
    pub rate: f64,
}

/// Exceedance rates for several `s` from one shared set of trajectories, so
/// the rates are monotone in `s` by construction.
pub fn tail_bound_grid(
    dist: &DegreeDistribution,
    s_values: &[f64],
    k_range: usize,
    n_runs: usize,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    let floor = (dist.k_max() + 1) as f64;
    if let Some(s) = s_values.iter().find(|&&s| s < floor) {
        return Err(Error::Precondition(format!("s = {s} is below k_max + 1 = {floor}")));
    }
    let a = dist.branching_factor();
    let peaks: Vec<f64> = simulate_many(dist, k_range.max(1), seed, n_runs, RootLaw::P)?
        .iter()
        .map(|tr| {
            (1..=k_range)
                .map(|k| tr.z[k] as f64 / a.powi(k as i32))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(s_values
        .iter()
        .map(|&s| {
            let exceed = peaks.iter().filter(|&&p| p > s).count();
            TailEstimate {
                s,
                k_range,
                exceed,
                n_runs,
                rate: exceed as f64 / n_runs as f64,
            }
        })
        .collect())
}

pub fn tail_bound_check(
    dist: &DegreeDistribution,
    s: f64,
    k_range: usize,
    n_runs: usize,
    seed: u64,
) -> Result<TailEstimate> {
    Ok(tail_bound_grid(dist, &[s], k_range, n_runs, seed)?[0])
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ConcentrationPoint {
    pub c: f64,
    /// Fraction of runs with `|a^{s−t} Z_t − Z_s| > c (s+1) a^{s/2}`.
    pub rate: f64,
}

/// How often `Z_t` strays from `a^{t−s} Z_s` by more than `c (s+1) a^{s/2}`
/// (after rescaling to generation `s`), for each `c`. One sample is shared,
/// so the rates never increase with `c`.
pub fn concentration_check(
    dist: &DegreeDistribution,
    s: usize,
    t: usize,
    c_values: &[f64],
    n_runs: usize,
    seed: u64,
) -> Result<Vec<ConcentrationPoint>> {
    if s < 1 || s >= t {
        return Err(Error::Precondition(format!("need 1 ≤ s < t, got s = {s}, t = {t}")));
    }
    let a = dist.branching_factor();
    let deviations: Vec<f64> = simulate_many(dist, t, seed, n_runs, RootLaw::P)?
        .iter()
        .map(|tr| (a.powi(s as i32 - t as i32) * tr.z[t] as f64 - tr.z[s] as f64).abs())
        .collect();
    let scale = (s + 1) as f64 * a.powf(s as f64 / 2.0);
    Ok(c_values
        .iter()
        .map(|&c| ConcentrationPoint {
            c,
            rate: deviations.iter().filter(|&&d| d > c * scale).count() as f64 / n_runs as f64,
        })
        .collect())
}
