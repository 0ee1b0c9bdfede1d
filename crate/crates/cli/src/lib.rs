//! `qbsim`: command-line front end over the simulation core.
//!
//! Subcommands map one-to-one onto the core operations; results are written
//! as CSV (with a metadata sidecar) or JSON (metadata inline). The `figure`
//! subcommand produces fixed preset datasets whose bytes are stable across
//! runs.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod table;

use args::{Cli, Command};
use config::{load_config_file, resolve_out_dir, Ctx};
pub use error::CliError;

/// Files written by a successful invocation.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

/// Parse and execute; errors come back instead of exiting, so tests can call
/// this in-process.
pub fn try_run<I, T>(argv: I) -> Result<RunOutput, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(RunOutput::default());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let cli = Cli::from_arg_matches(&matches)
        .map_err(|e| CliError::Usage(e.render().to_string()))?;

    let file = match &cli.config {
        Some(path) => load_config_file(path)?,
        None => serde_json::Map::new(),
    };
    let dir = resolve_out_dir(&matches, cli.out_dir.clone(), &file)?;

    let (_, sub) = matches.subcommand().expect("subcommand is required");
    let ctx = Ctx::new(sub, &file);
    let files = match &cli.command {
        Command::Spectrum(a) => commands::cmd_spectrum(a, &ctx, &dir)?,
        Command::Sweep(a) => commands::cmd_sweep(a, &ctx, &dir)?,
        Command::Scan(a) => commands::cmd_scan(a, &ctx, &dir)?,
        Command::CriticalN(a) => commands::cmd_critical_n(a, &ctx, &dir)?,
        Command::BetaSweep(a) => commands::cmd_beta_sweep(a, &ctx, &dir)?,
        Command::Figure(a) => figures::cmd_figure(a.which, &dir)?,
    };
    for f in &files {
        eprintln!("wrote {}", f.display());
    }
    Ok(RunOutput { files })
}

/// Execute and translate the outcome into a process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match try_run(argv) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
