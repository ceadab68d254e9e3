//! `density-search` and `sweep-n`: sample graphs with a two-point degree
//! law tuned to `alpha` and measure how close their `λ₁` lands.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use serde::Serialize;

use super::{
    delta0_too_large, median, tangle_radius, Command, CommandOutput, ExperimentConfig, Outcome,
    SCHEMA_VERSION,
};
use crate::config_sampler::{sample_simple, tangle_free_check, SimpleSample};
use crate::degree_model::{realize_sequence, solve_two_point, DegreeSequence};
use crate::error::Result;
use crate::nb_spectral::{power_iterate, prop51_diagnostics, NBOperator, PowerConfig, Prop51};
use crate::{par, seed};

/// What every trial at a given `n` shares.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub seq: DegreeSequence,
    pub alpha: f64,
    /// Branching factor of the degree law.
    pub a: f64,
    pub ell: usize,
    pub max_attempts: usize,
    pub power_tol: f64,
    pub timing: bool,
}

impl TrialSetup {
    pub fn new(cfg: &ExperimentConfig, n: usize) -> Result<Self> {
        let dist = solve_two_point(cfg.r, cfg.alpha)?;
        let a = dist.branching_factor();
        Ok(Self {
            seq: realize_sequence(&dist, n)?,
            alpha: cfg.alpha,
            a,
            ell: tangle_radius(cfg.delta0, n, a),
            max_attempts: cfg.max_attempts,
            power_tol: cfg.power_tol,
            timing: cfg.timing,
        })
    }

    /// The graph of the trial with this seed; any recorded trial can be
    /// replayed from its seed alone.
    pub fn sample(&self, seed: u64) -> Result<SimpleSample> {
        sample_simple(&self.seq, seed, self.max_attempts)
    }

    fn power_config(&self, op: &NBOperator) -> PowerConfig {
        PowerConfig {
            tol: self.power_tol,
            ..PowerConfig::for_operator(op, self.a)
        }
    }
}

/// One trial. Errors are recorded in `error` and leave the measurement
/// fields empty.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub attempts: Option<usize>,
    pub lambda1: Option<f64>,
    pub abs_error: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub ell: usize,
    pub tangle_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wallclock_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn within(&self, epsilon: f64) -> bool {
        self.abs_error.is_some_and(|e| e <= epsilon)
    }
}

pub fn run_trial(setup: &TrialSetup, trial: usize, seed: u64) -> TrialRecord {
    let start = Instant::now();
    let mut rec = TrialRecord {
        trial,
        seed,
        n: setup.seq.n(),
        attempts: None,
        lambda1: None,
        abs_error: None,
        iterations: None,
        residual: None,
        ell: setup.ell,
        tangle_free: None,
        wallclock_ms: None,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let sample = setup.sample(seed)?;
        rec.attempts = Some(sample.attempts);
        let g = sample.graph.as_multi();
        let op = NBOperator::new(g)?;
        let res = power_iterate(&op, &setup.power_config(&op), seed)?;
        rec.lambda1 = Some(res.lambda1);
        rec.abs_error = Some((res.lambda1 - setup.alpha).abs());
        rec.iterations = Some(res.iterations);
        rec.residual = Some(res.residual);
        rec.tangle_free = Some(tangle_free_check(g, setup.ell));
        Ok(())
    })();
    if let Err(e) = outcome {
        log::warn!("trial {trial} (seed {seed}): {e}");
        rec.error = Some(e.to_string());
    }
    if setup.timing {
        rec.wallclock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    rec
}

fn run_trials(setup: &TrialSetup, master: u64, trials: usize) -> Vec<TrialRecord> {
    par::map_indexed(trials, |i| run_trial(setup, i, seed::split(master, i as u64)))
}

/// The trial closest to `alpha`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Witness {
    pub trial: usize,
    pub seed: u64,
    pub lambda1: f64,
    pub abs_error: f64,
    /// Alignment of `(Bᵀ)^ℓψ̃` under `B^ℓ` on the witness graph.
    pub prop51: Prop51,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DensityReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub distribution: BTreeMap<usize, f64>,
    pub a: f64,
    pub b: f64,
    pub ell: usize,
    pub delta0_warning: bool,
    pub trials: Vec<TrialRecord>,
    pub successes: usize,
    pub success_fraction: f64,
    pub witness: Option<Witness>,
}

pub(crate) fn density_search(cfg: &ExperimentConfig) -> Result<(DensityReport, Option<SimpleSample>)> {
    let dist = solve_two_point(cfg.r, cfg.alpha)?;
    let (a, b) = dist.derived_constants();
    let delta0_warning = delta0_too_large(cfg.delta0, &dist);
    if delta0_warning {
        log::warn!("delta0 = {} is at least eta/16 for this degree law", cfg.delta0);
    }
    let setup = TrialSetup::new(cfg, cfg.n)?;
    log::info!("density-search: n = {}, {} trials, ell = {}", cfg.n, cfg.trials, setup.ell);
    let trials = run_trials(&setup, cfg.master_seed, cfg.trials);
    let successes = trials.iter().filter(|t| t.within(cfg.epsilon)).count();

    let best = trials
        .iter()
        .filter(|t| t.abs_error.is_some())
        .min_by(|x, y| x.abs_error.unwrap().total_cmp(&y.abs_error.unwrap()).then(x.trial.cmp(&y.trial)));
    let (witness, graph) = match best {
        Some(t) => {
            let sample = setup.sample(t.seed)?;
            let op = NBOperator::new(sample.graph.as_multi())?;
            let graph_file = match &cfg.witness_out {
                Some(path) => {
                    fs::write(path, sample.graph.as_multi().to_text())?;
                    Some(path.display().to_string())
                }
                None => None,
            };
            let w = Witness {
                trial: t.trial,
                seed: t.seed,
                lambda1: t.lambda1.unwrap(),
                abs_error: t.abs_error.unwrap(),
                prop51: prop51_diagnostics(&op, setup.ell),
                graph_file,
            };
            (Some(w), Some(sample))
        }
        None => (None, None),
    };
    let report = DensityReport {
        schema_version: SCHEMA_VERSION,
        command: Command::DensitySearch.name(),
        config: cfg.clone(),
        distribution: dist.into(),
        a,
        b,
        ell: setup.ell,
        delta0_warning,
        successes,
        success_fraction: successes as f64 / cfg.trials as f64,
        trials,
        witness,
    };
    Ok((report, graph))
}

pub fn cmd_density_search(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let (report, _) = density_search(cfg)?;
    let outcome = if report.successes > 0 {
        Outcome::Success
    } else {
        Outcome::StatisticalFailure
    };
    let csv = trial_csv(&report.trials);
    CommandOutput::new(&report, Some(csv), outcome)
}

/// Columns `n,trial,seed,attempts,lambda1,abs_error,iterations,tangle_free,error`.
fn trial_csv(trials: &[TrialRecord]) -> String {
    let mut s = String::from("n,trial,seed,attempts,lambda1,abs_error,iterations,tangle_free,error\n");
    let opt = |x: Option<String>| x.unwrap_or_default();
    for t in trials {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            t.n,
            t.trial,
            t.seed,
            opt(t.attempts.map(|v| v.to_string())),
            opt(t.lambda1.map(|v| v.to_string())),
            opt(t.abs_error.map(|v| v.to_string())),
            opt(t.iterations.map(|v| v.to_string())),
            opt(t.tangle_free.map(|v| v.to_string())),
            opt(t.error.as_ref().map(|e| format!("\"{}\"", e.replace('"', "'")))),
        );
    }
    s
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub trials: usize,
    pub failed_trials: usize,
    pub median_abs_error: f64,
    pub success_fraction: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    /// Adjacent pairs where the median goes up.
    pub inversions: usize,
    pub monotone: bool,
    pub records: Vec<TrialRecord>,
}

pub fn cmd_sweep_n(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let mut ns = cfg.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &n in &ns {
        let setup = TrialSetup::new(cfg, n)?;
        log::info!("sweep-n: n = {n}");
        let trials = run_trials(&setup, seed::split(cfg.master_seed, n as u64), cfg.trials);
        let mut errors: Vec<f64> = trials.iter().filter_map(|t| t.abs_error).collect();
        let failed = trials.len() - errors.len();
        let successes = trials.iter().filter(|t| t.within(cfg.epsilon)).count();
        rows.push(SweepRow {
            n,
            trials: cfg.trials,
            failed_trials: failed,
            median_abs_error: if errors.is_empty() { f64::NAN } else { median(&mut errors) },
            success_fraction: successes as f64 / cfg.trials as f64,
        });
        records.extend(trials);
    }
    let inversions = rows
        .windows(2)
        // a NaN median (every trial failed) counts as an inversion
        .filter(|w| {
            let order = w[1].median_abs_error.partial_cmp(&w[0].median_abs_error);
            !matches!(order, Some(Ordering::Less | Ordering::Equal))
        })
        .count();
    let monotone = inversions <= 1;
    let mut csv = String::from("n,trials,failed_trials,median_abs_error,success_fraction\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.n, r.trials, r.failed_trials, r.median_abs_error, r.success_fraction
        );
    }
    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        command: Command::SweepN.name(),
        config: cfg.clone(),
        rows,
        inversions,
        monotone,
        records,
    };
    let outcome = if monotone {
        Outcome::Success
    } else {
        Outcome::StatisticalFailure
    };
    CommandOutput::new(&report, Some(csv), outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 2000,
            trials: 4,
            ..Default::default()
        }
    }

    #[test]
    fn trials_replay_from_their_seed() {
        let cfg = small();
        let (report, _) = density_search(&cfg).unwrap();
        let setup = TrialSetup::new(&cfg, cfg.n).unwrap();
        for t in &report.trials {
            assert_eq!(t.seed, seed::split(cfg.master_seed, t.trial as u64));
            assert_eq!(&run_trial(&setup, t.trial, t.seed), t);
        }
        assert!(report.trials.iter().all(|t| t.wallclock_ms.is_none()));
    }

    #[test]
    fn reports_are_byte_identical() {
        let cfg = small();
        let a = cmd_density_search(&cfg).unwrap();
        let b = cmd_density_search(&cfg).unwrap();
        assert_eq!(a.report_text(), b.report_text());
        assert_eq!(a.csv, b.csv);
    }

    #[test]
    fn regular_endpoint_is_exact() {
        let cfg = ExperimentConfig {
            alpha: 3.0 - 1e-9,
            epsilon: 1e-6,
            n: 500,
            trials: 2,
            ..Default::default()
        };
        let (report, _) = density_search(&cfg).unwrap();
        assert_eq!(report.successes, 2);
        for t in &report.trials {
            assert!((t.lambda1.unwrap() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn failures_are_recorded() {
        let cfg = ExperimentConfig {
            max_attempts: 1,
            n: 3000,
            trials: 6,
            ..Default::default()
        };
        let (report, _) = density_search(&cfg).unwrap();
        let failed: Vec<_> = report.trials.iter().filter(|t| t.error.is_some()).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().all(|t| t.lambda1.is_none() && t.attempts.is_none()));
    }

    #[test]
    fn csv_shape() {
        let out = cmd_density_search(&small()).unwrap();
        let csv = out.csv.unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
    }
}
