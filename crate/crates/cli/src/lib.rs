//! Command-line front end: TOML run configs, scan and report files, and the
//! `simulate`, `reconstruct`, `pipeline` and `verify` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod verify;

pub use error::{CliError, Result};
