use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod output;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Io {
        path: String,
        source: std::io::Error,
    },
    Parse(String),
    Model(geonorm::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 1,
            // bad numeric arguments are input errors, not estimation failures
            CliError::Model(geonorm::Error::Domain(_) | geonorm::Error::InvalidAngle(_)) => 1,
            CliError::Model(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<geonorm::Error> for CliError {
    fn from(e: geonorm::Error) -> Self {
        CliError::Model(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(a) => {
            let path = a.common.config.clone();
            commands::sample(args::apply_config(a, path.as_deref())?)
        }
        Command::Fit(a) => {
            let path = a.common.config.clone();
            commands::fit(args::apply_config(a, path.as_deref())?)
        }
        Command::Moments(a) => {
            let path = a.common.config.clone();
            commands::moments(args::apply_config(a, path.as_deref())?)
        }
        Command::Curves(a) => {
            let path = a.common.config.clone();
            commands::curves(args::apply_config(a, path.as_deref())?)
        }
        Command::MseStudy(a) => {
            let path = a.common.config.clone();
            commands::mse_study(args::apply_config(a, path.as_deref())?)
        }
        Command::CltStudy(a) => {
            let path = a.common.config.clone();
            commands::clt_study(args::apply_config(a, path.as_deref())?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
