//! Library side of the `finsler-ceq` command-line tool: job files,
//! command dispatch and reports.

pub mod config;
pub mod report;
mod run;

pub use config::{Command, ConfigError, JobConfig, Overrides};
pub use report::{CommandResult, Report};
pub use run::{exit, run, run_with_threads, RunError};
