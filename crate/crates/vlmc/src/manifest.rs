//! Run manifests.
//!
//! A manifest stores the fully resolved argument list (seed included), so
//! `vlmc replay manifest.json` repeats the run bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::formats::{read_json, to_json};
use crate::io::write_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Arguments after the program name.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, args: Vec<String>, config: serde_json::Value) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            args,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_text(path, &to_json(self))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        read_json(path)
    }
}
