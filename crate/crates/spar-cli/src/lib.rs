//! Library half of the `spar` command-line tool: configuration, commands, output and verification.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
