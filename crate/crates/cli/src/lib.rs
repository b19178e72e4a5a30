//! Verification suites, report formats and the command line front end for
//! `ballharm-core`.

pub mod commands;
pub mod config;
pub mod output;
pub mod random;
pub mod suites;

pub use config::{ConfigError, Format, Overrides, RunConfig};
