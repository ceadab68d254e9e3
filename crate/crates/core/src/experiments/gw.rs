//! `gw-validate`: Monte-Carlo checks of the Galton-Watson limit object.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{Command, CommandOutput, ExperimentConfig, Outcome, SCHEMA_VERSION};
use crate::error::Result;
use crate::seed;
use crate::ugw_sim::{
    concentration_check, martingale_residuals, q_convergence_study, shuffle_generations,
    simulate_many, tail_bound_grid, ConcentrationPoint, MartingaleStats, QStudy, RootLaw,
    TailEstimate,
};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MeanRow {
    pub t: usize,
    pub mean: f64,
    pub stderr: f64,
    /// `a^{t−1} b` (1 at `t = 0`).
    pub expected: f64,
    pub within_3se: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GwReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub distribution: BTreeMap<usize, f64>,
    pub a: f64,
    pub b: f64,
    pub mean_law: Vec<MeanRow>,
    /// Computed on shuffled trajectories when `negative_control` is set.
    pub martingale: MartingaleStats,
    pub tail: Vec<TailEstimate>,
    pub concentration: Vec<ConcentrationPoint>,
    pub q_study: QStudy,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

const CONCENTRATION_C: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

pub fn cmd_gw_validate(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let dist = cfg.distribution()?;
    let (a, b) = dist.derived_constants();
    let master = cfg.master_seed;
    let t_max = cfg.gw_t_max;

    log::info!("gw-validate: {} trajectories to generation {t_max}", cfg.gw_runs);
    let trajectories = simulate_many(&dist, t_max, seed::split(master, 1), cfg.gw_runs, RootLaw::P)?;
    let runs = trajectories.len() as f64;
    let mean_law: Vec<MeanRow> = (0..=t_max)
        .map(|t| {
            let mean = trajectories.iter().map(|tr| tr.z[t] as f64).sum::<f64>() / runs;
            let var = trajectories
                .iter()
                .map(|tr| (tr.z[t] as f64 - mean).powi(2))
                .sum::<f64>()
                / (runs - 1.0);
            let stderr = (var / runs).sqrt();
            let expected = if t == 0 { 1.0 } else { a.powi(t as i32 - 1) * b };
            let slack = 3.0 * stderr + 1e-9 * expected;
            MeanRow {
                t,
                mean,
                stderr,
                expected,
                within_3se: (mean - expected).abs() <= slack,
            }
        })
        .collect();

    let martingale = if cfg.negative_control {
        let shuffled = shuffle_generations(&trajectories, seed::split(master, 2));
        martingale_residuals(&shuffled, &dist)?
    } else {
        martingale_residuals(&trajectories, &dist)?
    };

    let s0 = (dist.k_max() + 1) as f64;
    log::info!("gw-validate: tail bound with {} runs", cfg.tail_runs);
    let tail = tail_bound_grid(&dist, &[s0, 2.0 * s0, 4.0 * s0], t_max, cfg.tail_runs, seed::split(master, 3))?;
    let tail_pass = tail[0].rate < 0.5
        && tail.windows(2).all(|w| w[1].rate <= w[0].rate)
        && (tail[2].rate < tail[0].rate || tail[0].rate == 0.0);

    let concentration = concentration_check(
        &dist,
        (t_max / 2).max(1),
        t_max,
        &CONCENTRATION_C,
        cfg.tail_runs,
        seed::split(master, 5),
    )?;
    let concentration_pass = concentration.windows(2).all(|w| w[1].rate <= w[0].rate);

    log::info!("gw-validate: Q study, ell_max = {}, {} runs", cfg.ell_max, cfg.q_runs);
    let q_study = q_convergence_study(&dist, cfg.ell_max, cfg.q_runs, seed::split(master, 4))?;

    let suites = vec![
        SuiteResult {
            name: "mean_law",
            pass: mean_law.iter().all(|r| r.within_3se),
        },
        SuiteResult {
            name: "martingale",
            pass: martingale.contains_a,
        },
        SuiteResult {
            name: "tail_bound",
            pass: tail_pass,
        },
        SuiteResult {
            name: "concentration",
            pass: concentration_pass,
        },
        SuiteResult {
            name: "q_convergence",
            pass: q_study.plateau && q_study.moments_bounded,
        },
    ];
    let pass = suites.iter().all(|s| s.pass);

    let dist_label = format!("\"{dist}\"");
    let mut csv = String::from("dist,quantity,index,estimate,stderr,n_runs,seed\n");
    let mut row = |quantity: &str, index: String, estimate: f64, stderr: f64, n_runs: usize| {
        let _ = writeln!(csv, "{dist_label},{quantity},{index},{estimate},{stderr},{n_runs},{master}");
    };
    for r in &mean_law {
        row("mean_z", r.t.to_string(), r.mean, r.stderr, cfg.gw_runs);
    }
    for s in &martingale.per_t {
        row("slope", s.t.unwrap().to_string(), s.slope, s.stderr, cfg.gw_runs);
    }
    row("slope_pooled", String::new(), martingale.pooled.slope, martingale.pooled.stderr, cfg.gw_runs);
    for e in &tail {
        let se = (e.rate * (1.0 - e.rate) / e.n_runs as f64).sqrt();
        row("tail_rate", e.s.to_string(), e.rate, se, e.n_runs);
    }
    for p in &concentration {
        let se = (p.rate * (1.0 - p.rate) / cfg.tail_runs as f64).sqrt();
        row("concentration_rate", p.c.to_string(), p.rate, se, cfg.tail_runs);
    }
    for r in &q_study.rows {
        row("q_ratio", r.ell.to_string(), r.ratio, r.stderr / q_study.z_inf_mean, cfg.q_runs);
    }

    let report = GwReport {
        schema_version: SCHEMA_VERSION,
        command: Command::GwValidate.name(),
        config: cfg.clone(),
        distribution: dist.into(),
        a,
        b,
        mean_law,
        martingale,
        tail,
        concentration,
        q_study,
        suites,
        pass,
    };
    let outcome = if pass {
        Outcome::Success
    } else {
        Outcome::StatisticalFailure
    };
    CommandOutput::new(&report, Some(csv), outcome)
}
