mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};
use commands::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qplanar::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        use qplanar::Error as E;
        match self {
            CliError::Core(E::Pole(_)) => 3,
            CliError::Core(E::Identification(_)) => 1,
            _ => 2,
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::from_args(&cli.global)?;
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Verify { suite } => commands::cmd_verify(&cfg, suite),
        Command::Compute { object } => commands::cmd_compute(&cfg, object),
        Command::Decompose { n } => commands::cmd_decompose(&cfg, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
