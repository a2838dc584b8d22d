//! Dataset text files: one sequence per line, whitespace-separated symbols.
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::path::Path;

use vlmc_core::Dataset;

use crate::error::{CliError, CliResult};

pub fn parse_dataset(text: &str, alphabet_size: usize, depth: usize, path: &Path) -> CliResult<Dataset> {
    let mut sequences = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut seq = Vec::new();
        for token in line.split_whitespace() {
            let symbol = token
                .parse::<usize>()
                .ok()
                .filter(|&s| s < alphabet_size)
                .ok_or_else(|| CliError::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: format!("'{token}' is not a symbol of an alphabet of size {alphabet_size}"),
                })?;
            seq.push(symbol as u8);
        }
        sequences.push(seq);
    }
    Ok(Dataset::from_symbols(alphabet_size, sequences, depth)?)
}

pub fn read_dataset(path: &Path, alphabet_size: usize, depth: usize) -> CliResult<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset(&text, alphabet_size, depth, path)
}

pub fn format_dataset(dataset: &Dataset) -> String {
    let mut out = String::new();
    for s in dataset.sequences() {
        let mut first = true;
        for &x in s.symbols() {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{x}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_dataset(path: &Path, dataset: &Dataset) -> CliResult<()> {
    write_text(path, &format_dataset(dataset))
}
