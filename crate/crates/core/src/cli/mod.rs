//! The `toplist` command line. [`run`] is the whole program; the binary
//! only forwards process arguments and streams to it.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod args;
mod commands;
mod lists;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

macro_rules! data_errors {
    ($($t:ty),* $(,)?) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_errors!(
    std::io::Error,
    crate::ingest::ArchiveError,
    crate::ingest::ParseError,
    crate::combiner::CombineError,
    crate::combiner::ConfigError,
    crate::combiner::InputFileError,
    crate::combiner::ExtendedCsvError,
    crate::metrics::MetricsError,
    crate::resilience::ResilienceError,
    crate::records::RecordError,
);

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match commands::dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
