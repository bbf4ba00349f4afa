//! Command-line front end: argument parsing, subcommands and CSV/JSON
//! rendering. The binary in `main.rs` only maps outcomes to exit codes.

pub mod args;
pub mod commands;
pub mod table;

pub use args::{Cli, Format};
pub use commands::{run, CliError, Outcome};
