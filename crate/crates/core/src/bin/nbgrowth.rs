use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nbgrowth::experiments::{self, Command, ExperimentConfig};

/// Seeded experiments on non-backtracking spectra of random graphs.
#[derive(Parser)]
#[command(name = "nbgrowth", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample graphs tuned to alpha and record how close λ₁ lands.
    DensitySearch(Common),
    /// Median |λ₁ − alpha| across several n.
    SweepN(Common),
    /// Monte-Carlo checks of the Galton-Watson limit.
    GwValidate(Common),
    /// Turn the best sampled graph into a free-subgroup basis.
    EmitSubgroup(Common),
}

/// Flags shared by every subcommand. A flag given on the command line wins
/// over the config file, which wins over the defaults.
#[derive(Args)]
struct Common {
    /// TOML file of `key = value` settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "eps")]
    epsilon: Option<f64>,
    /// Vertex count; for sweep-n a comma-separated list.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    /// Degree law `k:p,…` for gw-validate.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    gw_runs: Option<usize>,
    #[arg(long)]
    tail_runs: Option<usize>,
    #[arg(long)]
    q_runs: Option<usize>,
    #[arg(long)]
    ell_max: Option<usize>,
    #[arg(long)]
    negative_control: bool,
    #[arg(long)]
    certificate_depth: Option<usize>,
    #[arg(long)]
    certificate_tol: Option<f64>,
    /// Record wall-clock times (reports are then no longer reproducible).
    #[arg(long)]
    timing: bool,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    witness_out: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn resolve(self, command: Command) -> nbgrowth::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg = cfg.merge_file(path)?;
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        set!(r => r, alpha => alpha, epsilon => epsilon, trials => trials, seed => master_seed,
             delta0 => delta0, max_attempts => max_attempts, gw_runs => gw_runs,
             tail_runs => tail_runs, q_runs => q_runs, ell_max => ell_max,
             certificate_depth => certificate_depth, certificate_tol => certificate_tol);
        if let Some(ns) = self.n {
            if command == Command::SweepN {
                cfg.n_list = ns;
            } else {
                match ns[..] {
                    [n] => cfg.n = n,
                    _ => {
                        return Err(nbgrowth::Error::Config(format!(
                            "{} takes a single --n",
                            command.name()
                        )))
                    }
                }
            }
        }
        cfg.negative_control |= self.negative_control;
        cfg.timing |= self.timing;
        if self.dist.is_some() {
            cfg.dist = self.dist;
        }
        for (flag, field) in [
            (self.out, &mut cfg.out),
            (self.csv, &mut cfg.csv),
            (self.witness_out, &mut cfg.witness_out),
            (self.out_dir, &mut cfg.out_dir),
        ] {
            if flag.is_some() {
                *field = flag;
            }
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::DensitySearch(c) => (Command::DensitySearch, c),
        Cmd::SweepN(c) => (Command::SweepN, c),
        Cmd::GwValidate(c) => (Command::GwValidate, c),
        Cmd::EmitSubgroup(c) => (Command::EmitSubgroup, c),
    };
    let result = common.resolve(command).and_then(|cfg| {
        let output = experiments::run(command, &cfg)?;
        experiments::write_outputs(&cfg, &output)?;
        Ok(output.outcome)
    });
    match result {
        Ok(outcome) => {
            if outcome != experiments::Outcome::Success {
                log::error!("{}: {:?}", command.name(), outcome);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(experiments::error_exit_code(&e) as u8)
        }
    }
}
