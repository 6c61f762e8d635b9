//! Command-line front end: definition files and the `escrowctl` commands.

pub mod commands;
pub mod format;
