use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use kpilab::experiments::{self, Experiment, ExperimentConfig, IdentityOptions};
use kpilab::io::{self, RunArtifact};
use kpilab::weights::{antiderivative_weight, build_weight, validate_weight, WeightSpec};
use kpilab::{par, Grid};

#[derive(Parser)]
#[command(name = "kpilab", version, about = "KP-I simulation and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifact directory.
    Run {
        experiment: Experiment,
        /// TOML file; omitted keys take the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Parent directory for run directories.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Print the realized class constants of a weight.
    ValidateWeight {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2048)]
        nx: usize,
        #[arg(long, default_value_t = 20.0)]
        lx: f64,
        #[arg(long, default_value_t = 0.5)]
        window: f64,
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
        /// Validate the antiderivative instead, in class `i + 1`.
        #[arg(long)]
        antiderivative: bool,
    },
    Check {
        #[command(subcommand)]
        what: Check,
    },
    /// Print the verdict table of a completed run.
    Report { run_dir: PathBuf },
    /// Print the fully resolved configuration.
    Config {
        experiment: Experiment,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Check {
    /// Main Equality residuals on the soliton run for one index.
    Identities {
        #[arg(long, value_delimiter = ',', num_args = 2)]
        alpha: Vec<u32>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
}

fn resolve(experiment: Experiment, config: Option<&Path>) -> Result<ExperimentConfig> {
    Ok(match config {
        Some(p) => io::parse_config(p, Some(experiment)).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::defaults(experiment),
    })
}

/// Runs, writes the artifact, prints the verdict; returns whether it passed.
fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<bool> {
    let outcome = experiments::run(cfg)?;
    let dir = io::write_artifact(&RunArtifact::from_outcome(cfg, outcome), &out.join(cfg.name.name()))?;
    let manifest = io::read_manifest(&dir)?;
    print!("{}", manifest.verdict.table());
    println!("artifact: {}", dir.display());
    Ok(manifest.verdict.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Some(n) = par::init_from_env() {
        info!("KPILAB_THREADS = {n}");
    }
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { experiment, config, seed, out } => {
            let mut cfg = resolve(experiment, config.as_deref())?;
            if let Some(s) = seed {
                cfg = cfg.with_seed(s);
            }
            execute(&cfg, &out)
        }
        Command::ValidateWeight { sigma, i, k, nx, lx, window, t_final, antiderivative } => {
            let grid = Grid::new(nx, 16, lx, 1.0)?;
            let mut w = build_weight(WeightSpec::new(sigma, i, k), &grid, window)?;
            if antiderivative {
                w = antiderivative_weight(&w)?;
            }
            let report = validate_weight(&w, &grid, t_final)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Check { what: Check::Identities { alpha, out } } => {
            let [a1, a2] = alpha[..] else { bail!("--alpha takes two integers, e.g. --alpha 1,0") };
            let mut cfg = ExperimentConfig::defaults(Experiment::Identities);
            cfg.identities = Some(IdentityOptions { alphas: vec![[a1, a2]], ..Default::default() });
            cfg.validate()?;
            execute(&cfg, &out)
        }
        Command::Report { run_dir } => {
            let m = io::read_manifest(&run_dir)?;
            println!("experiment: {}  seed: {:?}  code: {}", m.experiment, m.seed, m.code_version);
            print!("{}", m.verdict.table());
            Ok(m.verdict.passed)
        }
        Command::Config { experiment, config } => {
            let cfg = resolve(experiment, config.as_deref())?;
            print!("{}", io::config_to_toml(&cfg)?);
            Ok(true)
        }
    }
}
