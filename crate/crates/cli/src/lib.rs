//! Command-line front end for `nanotube-spectra`.
//!
//! [`parse_args`] turns argv into a validated [`RunConfig`]; [`run`] executes
//! it and returns the exit code: 0 on success, 1 when `validate` finds a
//! mismatch, 2 on usage or input errors.

mod args;
pub mod output;
mod run;

pub use args::{parse_args, OutputFormat, RunConfig, Subcommand, UsageError, BIN_NAME};
pub use run::{configure_threads, run, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
