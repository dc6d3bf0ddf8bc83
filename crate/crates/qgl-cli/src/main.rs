//! `qgl`: experiment runner for the Gibbs-sampler toolkit.
//!
//! Usage: `qgl <experiment> --config <file> [--out <path>] [--format csv|json]
//! [--seed <int>]`. Reports go to stdout unless `--out` is given, in which
//! case they are written atomically (temp file + rename). Exit codes:
//! 0 success, 1 a check failed, 2 configuration error, 3 instance error.

mod config;
mod experiments;
mod output;

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum RunError {
    /// Bad config file, unknown experiment, bad sweep: exit 2.
    Config(String),
    /// The instance itself cannot be built or simulated: exit 3.
    Instance(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Instance(m) => write!(f, "instance error: {m}"),
        }
    }
}

const COLUMN_HELP: &str = "\
Experiments and their CSV columns:
  parseval                  n_qubits,N,residual_identity,sum_norm,status
  oft-tails                 mu,measured,bound,status
  secular-bound             mu,measured,bound,status
  fixed-point-scan          sigma_t,beta,N,trace_distance,t_mix_lb,runtime_s
                            (sweep sigma_t for the discrete generator, or T
                            for the uniform-window generator; the first
                            column holds the swept value)
  davies-exactness          beta,trace_distance,status
  mixing-time               case,t_mix,reference,status
  adb-scan                  mu,epsilon,bound,status
  proxy-eigvec-scan         sigma_t,distance,bound,status
  weak-measure-convergence  label,value,reference,status
  block-encode-verify       N,block_residual,reject_residual,unitarity,status
  discriminant-block-verify N,hermiticity,block_residual,status
  anneal-path               beta_j,gap,eigvec_dist,overlap_next,status
  discretization-convergence N,generator_distance,status
  bound-suite               name,lhs,rhs,status,note

QGL_THREADS bounds the sweep worker count. runtime_s is wall-clock and, like
the leading '# generated' comment, is not covered by the per-seed
byte-determinism of the report body.";

#[derive(Parser, Debug)]
#[command(
    name = "qgl",
    about = "Run Gibbs-sampler Lindbladian experiments",
    after_long_help = COLUMN_HELP
)]
struct Cli {
    /// Experiment name (see --help for the registered set).
    experiment: String,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Seed override for sampled subroutines.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: &Cli) -> Result<bool, RunError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = config::ExperimentConfig::parse(&text)?;
    if cfg.experiment != cli.experiment {
        // The positional name wins; the config echo keeps the actual run.
        cfg.experiment = cli.experiment.clone();
    }
    if !experiments::EXPERIMENTS.contains(&cfg.experiment.as_str()) {
        return Err(RunError::Config(format!(
            "unknown experiment '{}'; registered: {}",
            cfg.experiment,
            experiments::EXPERIMENTS.join(", ")
        )));
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let report = experiments::run(&cfg, seed)?;

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let body = match cli.format.as_str() {
        "json" => {
            let echo: toml::Value = toml::from_str(&text)
                .map_err(|e| RunError::Config(format!("config echo failed: {e}")))?;
            report.to_json(timestamp, &echo)
        }
        _ => report.to_csv(timestamp),
    };
    match &cli.out {
        Some(path) => output::write_atomic(path, &body)?,
        None => print!("{body}"),
    }
    for failure in &report.failures {
        eprintln!("check failed: {failure}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e @ RunError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ RunError::Instance(_)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}
