//! Library side of the `bellkit` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use error::{CliError, ExitStatus};
