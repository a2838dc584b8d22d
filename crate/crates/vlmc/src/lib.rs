//! File formats, reports and the `vlmc` command line for [`vlmc_core`].
//!
//! Datasets are plain text with one sequence per line. Trees, allowed
//! matrices and probabilistic context trees are JSON with contexts written
//! oldest symbol first. Every command writes a manifest that replays it.

pub mod cli;
pub mod error;
pub mod formats;
pub mod io;
pub mod manifest;
pub mod parallel;

pub use error::{CliError, CliResult};
