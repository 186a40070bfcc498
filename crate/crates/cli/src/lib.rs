//! Library side of the `fadres` command-line tool.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::time::Instant;

use config::{Cli, Command};

/// Exit status 2 for argument, config and I/O problems, 3 for numerical
/// failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(fadres_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fadres_core::Error> for CliError {
    fn from(e: fadres_core::Error) -> Self {
        match e {
            fadres_core::Error::Domain(msg) => CliError::Usage(msg),
            other => CliError::Numerical(other),
        }
    }
}

/// Runs one parsed invocation and writes its output.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    let options = cli.command.options().clone().resolve()?;
    let format = options.format()?;
    let started = Instant::now();

    let table = match &cli.command {
        Command::Xi(_) => commands::xi_point(&options),
        Command::Surface(_) => commands::surface(&options),
        Command::Bigxi(_) => commands::big_xi(&options),
        Command::Resonances(_) => commands::resonances(&options),
        Command::Pole(_) => commands::pole(&options),
        Command::Convert(_) => commands::convert(&options),
    }?;

    let bytes = output::render(&table, format, name, &options)?;
    output::write_output(&bytes, options.out.as_deref())?;
    // Timing stays off the output so that repeated runs compare equal.
    eprintln!(
        "{name}: {} row(s) in {:.3} s",
        table.rows.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

/// Worker count from `FADRES_THREADS`; `None` leaves the default.
pub fn thread_count(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "FADRES_THREADS must be a positive integer, got '{text}'"
            ))),
        },
    }
}
