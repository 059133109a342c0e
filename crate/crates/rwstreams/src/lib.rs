//! File formats, usage reports and the `rws` command-line tool for
//! [`rwstreams_core`].

pub mod cli;
pub mod format;
pub mod grammar_text;
pub mod report;

pub use cli::{execute, run, Cli, CliError, RunConfig};
pub use report::RunReport;
