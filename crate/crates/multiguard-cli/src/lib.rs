//! Library surface of the `multiguard` binary, split out so integration
//! tests can drive the subcommands in-process.

pub mod args;
pub mod commands;
pub mod files;

pub use args::{Cli, Command};
pub use commands::{run, CliError, EXIT_IO, EXIT_SOUNDNESS, EXIT_VALIDATION};
