//! Command-line front end for `ivsensa-core`: CSV ingestion, argument handling
//! and the CSV/JSON table formats.

pub mod cli;
pub mod error;
pub mod format;
pub mod grid;
pub mod io;
mod logger;

pub use cli::{execute, run, RunConfig};
pub use error::CliError;
