//! File formats, parallel sweeps and the `coherdiag` command line on top of
//! [`coherdiag_core`].

pub mod app;
pub mod error;
pub mod report;
pub mod sweep;
pub mod table;

pub use error::{CliError, Result};
