//! Command-line driver and file formats for `lzsm-core`: JSON config,
//! grid and lineshape CSV, PGM rendering, JSON reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod render;

pub use config::RunConfig;
pub use error::{CliError, CliResult};

#[cfg(test)]
mod cli_tests;
