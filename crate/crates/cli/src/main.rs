mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::commands::Report;
use crate::config::{Cli, CliError, Command, RunConfig};
use crate::output::write_atomic;

fn emit(cfg: &RunConfig, report: &Report) -> Result<(), CliError> {
    let bytes = report.table.encode(cfg.format);
    match &cfg.out {
        Some(path) => write_atomic(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (cfg, report) = match cli.command {
        Command::Spectrum(a) => {
            let cfg = a.resolve()?;
            let r = commands::spectrum(&cfg)?;
            (cfg, r)
        }
        Command::Gscan(a) => {
            let cfg = a.resolve()?;
            let r = commands::gscan(&cfg)?;
            (cfg, r)
        }
        Command::Diagnose(a) => {
            let cfg = a.run.resolve()?;
            let r = commands::diagnose(&cfg, a.self_test)?;
            (cfg, r)
        }
    };
    emit(&cfg, &report)?;
    if report.exit_code != 0 {
        eprintln!("rabi-spectra: residual check failed; see rows with passed = false");
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("rabi-spectra: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
