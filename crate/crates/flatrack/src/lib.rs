//! Command-line front end for `flatrack-core`: scenario files, CSV traces,
//! stability reports and parameter sweeps.

pub mod commands;
pub mod csv;
pub mod error;
pub mod output;
pub mod scenario;

pub use error::CliError;
