//! Batch front end for `qproj`: JSON model files in, CSV/JSON reports
//! out, plus the named verification suites.
//!
//! Exit codes: 0 success, 1 I/O error or failed check, 2 schema violation,
//! 3 numerical non-convergence.

pub mod commands;
pub mod error;
pub mod model;
pub mod output;
pub mod suites;

#[cfg(test)]
mod tests;

pub use commands::{configure_workers, run, Cli};
pub use error::{CliError, CliResult};
