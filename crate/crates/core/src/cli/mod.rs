//! Argument parsing, config resolution and subcommand execution for the `afrelay` binary.

mod args;
mod config;
mod dispatch;

use std::ffi::OsString;

use clap::Parser;

pub use args::{
    Cli, Command, CommonArgs, CutsetArgs, DofArgs, Format, PairingCheckArgs, Preset, RatesArgs, SimulateArgs, SnrSpec,
    SweepArgs,
};
pub use config::{parse_config, CommandConfig, RunConfig};
pub use dispatch::{dispatch, execute, PairingRow, PolytopeOutput, RateRow, SimRow};

use crate::Error;

/// Process exit status for `err`: 1 for invalid input, 2 for numerical or I/O failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_validation() {
        1
    } else {
        2
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match parse_config(cli) {
        Ok(cfg) => dispatch(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
