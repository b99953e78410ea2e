mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use whiplab::par::Exec;

use args::{Cli, Command};
use commands::Ctx;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Engine(String),
    #[error("{0} check(s) failed")]
    Verify(usize),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Treats any core error as a configuration problem.
    fn config(e: whiplab::Error) -> CliError {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Config(_) => 2,
            CliError::Engine(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<whiplab::Error> for CliError {
    fn from(e: whiplab::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Engine(e.to_string())
        }
    }
}

fn exec_for(cli: &Cli) -> Result<Exec, CliError> {
    if let Command::Bench { .. } = cli.command {
        return Ok(Exec::Sequential);
    }
    match cli.threads {
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(1) => Ok(Exec::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .map_err(|e| CliError::Engine(e.to_string()))?;
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::Parallel),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx { cli, exec: exec_for(cli)? };
    match &cli.command {
        Command::Scan(a) => commands::scan(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Count { what } => commands::count(&ctx, what),
        Command::Bench { what } => commands::bench(&ctx, what),
        Command::Vqe(a) => commands::vqe(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("whiplab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
