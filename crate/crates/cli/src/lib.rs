//! Command-line companion to the core library: file formats, run
//! configurations, subcommand implementations, and SVG reporting. The
//! `annomod` binary is a thin dispatcher over these modules.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod plot;
