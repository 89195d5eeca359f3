//! Scenario files, command dispatch and the algebraization pipeline for the
//! `vinf` command line tool.

pub mod algebraize;
pub mod commands;
pub mod error;
pub mod oracle;
pub mod places;
pub mod scenario;

pub use error::{CliError, Result};
