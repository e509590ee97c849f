//! File formats, reports and scripted experiments on top of `helfrich-core`.
//!
//! The `helfrich` binary exposes these as subcommands; every output is a
//! deterministic function of the command line.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod reports;

pub use error::{CliError, Result};
