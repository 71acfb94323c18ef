//! Command-line front end: state reports, Fisher information and matrices,
//! parameter scans, phase-scaling tables and seeded oracle checks.

pub mod app;
pub mod check;
pub mod commands;
pub mod error;
pub mod format;
pub mod params;

pub use app::Cli;
pub use commands::run;
pub use error::{CliError, Result};
