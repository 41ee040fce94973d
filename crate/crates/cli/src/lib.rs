//! Scenario runner: parses scenario files, runs the requested analyses in
//! declaration order and assembles a deterministic text report with CSV
//! side tables.
//!
//! The scenario grammar is documented in [`scenario`]; the report layout in
//! [`report`].

pub mod catalog;
pub mod report;
pub mod runner;
pub mod scenario;

use std::path::Path;

pub use catalog::catalog;
pub use report::{Record, Report, Table};
pub use runner::{run, Outcome, RunOptions};
pub use scenario::{parse_scenario, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn parse(line: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Reads, parses and runs a scenario file.
pub fn run_file(path: &Path, options: &RunOptions) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path)?;
    let scenario = parse_scenario(&text)?;
    Ok(run(&scenario, options))
}
