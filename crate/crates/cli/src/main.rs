use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fbh_cli::{execute, Cli, CliError, Status};

fn write_output(cli: &Cli, bytes: &[u8]) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::internal(format!("cannot write output: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Status::ConfigError as u8
            } else {
                0
            });
        }
    };
    if let Some(threads) = cli.threads.filter(|&t| t > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(Status::Internal as u8);
        }
    }
    let result =
        execute(&cli).and_then(|(bytes, failures)| write_output(&cli, &bytes).map(|_| failures));
    match result {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!("tolerance failure: {f}");
            }
            ExitCode::from(Status::ToleranceFailure as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status as u8)
        }
    }
}
