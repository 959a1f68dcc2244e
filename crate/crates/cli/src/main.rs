mod args;
mod commands;
mod output;
mod selftest;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use output::Table;

/// Config errors exit with 2, numerical failures with 3, failed self-tests with 1.
fn exit_code(e: &flatdet::Error) -> u8 {
    match e {
        flatdet::Error::Domain(_) | flatdet::Error::DimensionMismatch { .. } => 2,
        _ => 3,
    }
}

fn emit(cli: &Cli, table: &Table) -> std::io::Result<()> {
    match &cli.common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cli, &mut w)?;
            w.flush()
        }
        None => table.write(cli, std::io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (table, passed) = if cli.common.self_test {
        match selftest::run(&cli.command) {
            Ok(s) => (s.table, s.passed),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e));
            }
        }
    } else {
        match commands::run(&cli.command, &cli.common) {
            Ok(t) => (t, true),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e));
            }
        }
    };
    if let Err(e) = emit(&cli, &table).or_else(|e| match e.kind() {
        // A closed downstream pipe is not an error of the run.
        std::io::ErrorKind::BrokenPipe => Ok(()),
        _ => Err(e),
    }) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: self-test failed");
        ExitCode::from(1)
    }
}
