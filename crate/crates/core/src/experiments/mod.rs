//! Seeded experiment drivers behind the `nbgrowth` binary.
//!
//! Each command takes an [`ExperimentConfig`], runs its trials in parallel
//! on per-trial seeds `split(master_seed, index)`, and returns a
//! [`CommandOutput`]: a JSON report, optional CSV rows and an [`Outcome`]
//! that maps to the process exit code. Reports carry no timing data unless
//! `timing` is set, so identical configurations give byte-identical
//! reports.

mod density;
mod gw;
mod subgroup;

pub use density::{
    cmd_density_search, cmd_sweep_n, run_trial, DensityReport, SweepReport, SweepRow, TrialRecord,
    TrialSetup, Witness,
};
pub use gw::{cmd_gw_validate, GwReport, MeanRow, SuiteResult};
pub use subgroup::{cmd_emit_subgroup, SubgroupReport};

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degree_model::{solve_two_point, DegreeDistribution};
use crate::error::{Error, Result};

/// Bumped whenever a report field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    DensitySearch,
    SweepN,
    GwValidate,
    EmitSubgroup,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DensitySearch => "density-search",
            Command::SweepN => "sweep-n",
            Command::GwValidate => "gw-validate",
            Command::EmitSubgroup => "emit-subgroup",
        }
    }
}

/// Everything a run depends on. Unset keys take the defaults below; a
/// config file may set any subset of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free-group rank; degrees live in `{2, …, 2r}`.
    pub r: usize,
    /// Target non-backtracking spectral radius, in `(1, 2r−1)`.
    pub alpha: f64,
    pub epsilon: f64,
    /// Vertex count for `density-search` and `emit-subgroup`.
    pub n: usize,
    /// Vertex counts for `sweep-n`.
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// `ℓ = max(2, ⌊δ₀ ln n / ln a⌋)` for tangle-free checks and
    /// alignment diagnostics.
    pub delta0: f64,
    pub max_attempts: usize,
    pub power_tol: f64,
    /// Degree law for `gw-validate` as `"k:p,…"`; the two-point law for
    /// `(r, alpha)` when unset.
    pub dist: Option<String>,
    pub gw_runs: usize,
    pub gw_t_max: usize,
    pub tail_runs: usize,
    pub ell_max: usize,
    pub q_runs: usize,
    /// Runs the martingale suite on generation-shuffled trajectories, which
    /// must fail.
    pub negative_control: bool,
    pub certificate_depth: usize,
    pub certificate_tol: f64,
    /// Adds per-trial wall-clock times to reports.
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// Where `density-search` writes the best graph as an edge list.
    pub witness_out: Option<PathBuf>,
    /// Where `emit-subgroup` writes its files.
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            r: 2,
            alpha: 2.0,
            epsilon: 0.05,
            n: 100_000,
            n_list: vec![1_000, 10_000, 100_000],
            trials: 20,
            master_seed: 42,
            delta0: 0.2,
            max_attempts: 1000,
            power_tol: 1e-10,
            dist: None,
            gw_runs: 100_000,
            gw_t_max: 8,
            tail_runs: 10_000,
            ell_max: 9,
            q_runs: 10_000,
            negative_control: false,
            certificate_depth: 18,
            certificate_tol: 0.1,
            timing: false,
            out: None,
            csv: None,
            witness_out: None,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// Reads `key = value` lines (TOML). Keys absent from the file keep the
    /// values of `self`.
    pub fn merge_file(&self, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        self.merge_str(&text)
    }

    pub fn merge_str(&self, text: &str) -> Result<Self> {
        let overrides: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut base = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        base.extend(overrides);
        base.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn validate(&self, command: Command) -> Result<()> {
        let top = (2 * self.r).saturating_sub(1) as f64;
        let fail = |msg: String| Err(Error::Config(msg));
        if self.r < 2 {
            return fail(format!("r = {} must be at least 2", self.r));
        }
        if self.alpha.is_nan() || self.alpha <= 1.0 || self.alpha >= top {
            return fail(format!("alpha = {} must lie in (1, {top})", self.alpha));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return fail(format!("epsilon = {} must be positive", self.epsilon));
        }
        if self.trials < 1 {
            return fail("trials must be at least 1".into());
        }
        if self.delta0.is_nan() || self.delta0 <= 0.0 {
            return fail(format!("delta0 = {} must be positive", self.delta0));
        }
        if self.max_attempts < 1 {
            return fail("max_attempts must be at least 1".into());
        }
        let min_n = 2 * self.r + 1;
        match command {
            Command::SweepN => {
                let mut distinct = self.n_list.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 3 {
                    return fail(format!("sweep-n needs at least 3 distinct n, got {:?}", self.n_list));
                }
                if distinct[0] < min_n {
                    return fail(format!("every n must be at least {min_n}"));
                }
            }
            Command::GwValidate => {
                if self.gw_t_max < 2 || self.ell_max < 4 {
                    return fail("gw_t_max must be at least 2 and ell_max at least 4".into());
                }
                self.distribution()?;
            }
            Command::DensitySearch | Command::EmitSubgroup => {
                if self.n < min_n {
                    return fail(format!("n = {} must be at least {min_n}", self.n));
                }
            }
        }
        Ok(())
    }

    /// The law `dist` if given, else the two-point law on `{2, 2r}` with
    /// branching factor `alpha`.
    pub fn distribution(&self) -> Result<DegreeDistribution> {
        match &self.dist {
            Some(s) => s.parse().map_err(|e: Error| Error::Config(e.to_string())),
            None => solve_two_point(self.r, self.alpha).map_err(|e| Error::Config(e.to_string())),
        }
    }
}

/// `max(2, ⌊δ₀ ln n / ln a⌋)`.
pub fn tangle_radius(delta0: f64, n: usize, a: f64) -> usize {
    ((delta0 * (n as f64).ln() / a.ln()).floor() as usize).max(2)
}

/// Whether `δ₀` reaches `η/16` with `η = ln a / ln k_max`, beyond which the
/// tangle-free and alignment estimates lose their guarantees.
pub fn delta0_too_large(delta0: f64, dist: &DegreeDistribution) -> bool {
    let eta = dist.branching_factor().ln() / (dist.k_max() as f64).ln();
    delta0 >= eta / 16.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    StatisticalFailure,
    CertificateFailure,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::StatisticalFailure => 3,
            Outcome::CertificateFailure => 4,
        }
    }
}

/// Exit code for a run that stopped with an error.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        _ => 1,
    }
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: serde_json::Value,
    pub csv: Option<String>,
    pub outcome: Outcome,
}

impl CommandOutput {
    fn new<T: Serialize>(report: &T, csv: Option<String>, outcome: Outcome) -> Result<Self> {
        Ok(Self {
            report: serde_json::to_value(report)?,
            csv,
            outcome,
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("values serialize");
        s.push('\n');
        s
    }
}

/// Runs one command after validating the config.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.validate(command)?;
    match command {
        Command::DensitySearch => cmd_density_search(cfg),
        Command::SweepN => cmd_sweep_n(cfg),
        Command::GwValidate => cmd_gw_validate(cfg),
        Command::EmitSubgroup => cmd_emit_subgroup(cfg),
    }
}

/// Writes the report to `cfg.out` (stdout when unset) and CSV to `cfg.csv`.
pub fn write_outputs(cfg: &ExperimentConfig, output: &CommandOutput) -> Result<()> {
    let text = output.report_text();
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(csv)) = (&cfg.csv, &output.csv) {
        fs::write(path, csv)?;
    }
    Ok(())
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}
