//! Command-line front end for `gbi-core`: argument parsing, JSON/CSV output
//! and thread-parallel searches.

pub mod cli;
pub mod error;
pub mod output;
pub mod parallel;
pub mod parse;

pub use error::CliError;
