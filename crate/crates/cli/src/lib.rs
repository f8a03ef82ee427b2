//! File formats and subcommands of the `solp` command-line tool.

pub mod commands;
pub mod format;
