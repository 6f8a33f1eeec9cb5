//! Command-line front end for the `qbs-core` operator library.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod table;
pub mod verify;

pub use commands::run;
pub use config::{parse_args, Cli, Command, RunConfig};
pub use error::CliError;
pub use expr::parse_function;
pub use table::CsvTable;

use std::ffi::OsString;
use std::io::Write;

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_args(args)
        .and_then(RunConfig::from_cli)
        .and_then(|cfg| run(&cfg, out, err));
    match result {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let _ = if e.exit_code() == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            e.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.exit_code() == 2 {
                let _ = writeln!(err, "run `qbs --help` for usage");
            }
            e.exit_code()
        }
    }
}
