mod args;
mod cmd;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use scnn_core::{AccumulationMode, ExecPolicy};

use args::{Cli, Command};
use config::ExperimentConfig;

/// Exit code 1 for failed checks, 2 for usage and configuration errors.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

impl From<scnn_core::Error> for Failure {
    fn from(e: scnn_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub struct Context {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub mode: AccumulationMode,
    pub exec: ExecPolicy,
    pub config: ExperimentConfig,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        out_dir: cli
            .out_dir
            .clone()
            .or_else(|| config.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
        mode: cli.mode.or(config.mode).unwrap_or_default(),
        exec: cli.exec.into(),
        config,
    };
    match &cli.command {
        Command::Fit(a) => cmd::fit::run(&ctx, a),
        Command::Sweep(a) => cmd::sweep::run(&ctx, a),
        Command::Bound(a) => cmd::bound::run(&ctx, a),
        Command::Convert(a) => cmd::convert::run(&ctx, a),
        Command::Energy(a) => cmd::energy::run(&ctx, a),
        Command::Eval(a) => cmd::eval::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
