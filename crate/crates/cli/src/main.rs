use std::process::ExitCode;

use clap::Parser;
use fadres_cli::{config::Cli, run, thread_count, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };

    let threads = std::env::var("FADRES_THREADS").ok();
    let result = thread_count(threads.as_deref()).and_then(|n| {
        if let Some(n) = n {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        run(cli)
    });

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fadres: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
