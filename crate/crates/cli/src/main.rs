//! `stokes`: batch front end for spectra, oracle checks, heat traces, fits
//! and isoperimetric verdicts. Stages exchange CSV and JSON files.
//!
//! Exit status 2 means a configuration error, 3 a certified-accuracy
//! failure. The worker pool size follows `RAYON_NUM_THREADS`.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use stokes_core::Error;

use args::Cli;

/// Configuration error: bad flags, inconsistent inputs, unreadable files.
const EXIT_CONFIG: u8 = 2;
/// The requested accuracy could not be certified.
const EXIT_ACCURACY: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CutoffInsufficient { .. }
        | Error::TailTooLarge { .. }
        | Error::MajorantViolated { .. }
        | Error::IllConditioned(_)
        | Error::NoConvergence(_)
        | Error::NotPositiveDefinite
        | Error::Bracket { .. } => EXIT_ACCURACY,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stokes: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
