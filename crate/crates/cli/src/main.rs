use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qutrit_core::experiment::{self, ExperimentConfig, Mode};

/// Qutrit annealing clustering experiments.
#[derive(Parser)]
#[command(name = "qclust", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Exhaustive minimizer search and the weight table.
    Oracle(Common),
    /// Ideal split-operator anneal.
    Ideal(Common),
    /// Gate-level steps against the exact step operators.
    IrVerify(Common),
    /// Gate program and pulse program with statistics.
    Compile(Common),
    /// Pulse-level anneal.
    Simulate(Common),
    /// Parameter sweep from the config's sweep section.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent sweep points.
    #[arg(long)]
    workers: Option<usize>,
    /// Stop after this many anneal steps.
    #[arg(long)]
    max_steps: Option<usize>,
}

impl Common {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        if self.workers.is_some() {
            config.output.workers = self.workers;
        }
        if self.max_steps.is_some() {
            config.output.max_steps = self.max_steps;
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (mode, common) = match &cli.verb {
        Verb::Oracle(c) => (Some(Mode::Oracle), c),
        Verb::Ideal(c) => (Some(Mode::Ideal), c),
        Verb::IrVerify(c) => (Some(Mode::IrVerify), c),
        Verb::Compile(c) => (Some(Mode::Compile), c),
        Verb::Simulate(c) => (Some(Mode::Pulse), c),
        Verb::Sweep(c) => (None, c),
    };
    let mut config = common.load()?;
    let out = config.output.dir.clone();
    let written = match mode {
        Some(mode) => {
            config.mode = mode;
            experiment::run(config, &out)?
        }
        None => vec![experiment::run_sweep(config, &out)?],
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}
