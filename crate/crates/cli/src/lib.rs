//! File formats and command implementations behind the `amt` binary.
//!
//! Each command is a plain function returning a serializable report so that
//! tests can drive it in-process; `main.rs` only parses flags, prints JSON and
//! maps errors to exit codes.

pub mod commands;
pub mod error;
pub mod formats;

pub use error::{CliError, CliResult};
