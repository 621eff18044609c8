//! Command-line front end for `rdsquare-core`: argument parsing, report
//! formats, checkpointed sweeps and parallel dispatch.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod output;
pub mod records;
pub mod run;
pub mod sweep;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use cli::parse_config;
pub use config::{Command, OutputFormat, RunConfig, SamplingMode, SearchParams};
pub use run::{run, Outcome, RunError};
