//! `photonsphere`: photon-sphere verification from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 refused input,
//! 64 configuration error, 65 Buchdahl violation, 74 I/O error.

// `!(x <= tol)` is used on purpose so that NaN fails every gate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod exit;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{resolve, Command, CommonArgs};
use crate::exit::{CliError, Status};

#[derive(Parser)]
#[command(name = "photonsphere", version, about = "Photon-sphere detection, audits and the rigidity pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Static-vacuum residual scan.
    Verify,
    /// Locate photon spheres and corroborate them by ray tracing.
    PhotonSearch,
    /// Photon-sphere identities at given (or detected) radii.
    Audit,
    /// Glue a neck, double, and report matching jumps.
    Glue,
    /// Full rigidity pipeline.
    Pipeline,
    /// Very compact star scenario.
    Star,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Verify => Command::Verify,
            Cmd::PhotonSearch => Command::PhotonSearch,
            Cmd::Audit => Command::Audit,
            Cmd::Glue => Command::Glue,
            Cmd::Pipeline => Command::Pipeline,
            Cmd::Star => Command::Star,
        }
    }
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let cmd = Command::from(cli.command);
    let (settings, profile) = resolve(cmd, &cli.common)?;
    let result = match cmd {
        Command::Verify => commands::verify(&settings, &profile),
        Command::PhotonSearch => commands::photon_search(&settings, &profile),
        Command::Audit => commands::audit(&settings, &profile),
        Command::Glue => commands::glue(&settings, &profile),
        Command::Pipeline => commands::pipeline(&settings, &profile),
        Command::Star => commands::star(&settings),
    };
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            commands::emit(&settings, &outcome)?;
            Ok(outcome.status)
        }
        Err(err) => {
            commands::emit_error(&settings, &err)?;
            Err(err)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Status::Config as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.status as u8)
        }
    }
}
