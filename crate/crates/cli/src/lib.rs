//! Config-driven runner: parse a TOML description of `h`, run one pipeline
//! and collect checks and CSV artifacts into a report.

pub mod config;
pub mod report;
pub mod run;

pub use config::{load_config, Command, RunConfig};
pub use report::{write_report, Check, RunReport};
pub use run::run_command;
