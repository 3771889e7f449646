use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use multiway_cli::{run, threads_from_env, Cli, CliError, Outcome, EXIT_USAGE};

fn write_outputs(outcome: &Outcome) -> Result<(), CliError> {
    match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.artifact)
            .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.artifact.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot write output: {e}")))?;
        }
    }
    eprint!("{}", outcome.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env(std::env::var("MULTIWAY_THREADS").ok().as_deref())
        .and_then(|threads| run(&cli, threads))
        .and_then(|outcome| write_outputs(&outcome).map(|_| outcome.status));
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status)
        }
    }
}
