//! File codecs. Tabular data is comma-separated text with a header row;
//! geometry is GeoJSON feature collections in projected meters.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so every
//! emitted value re-parses to the identical `f64`.

pub mod features;
pub mod tables;

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Literal written in place of a travel time for unreachable nodes.
pub const UNREACHABLE: &str = "unreachable";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}

pub(crate) fn parse_error(path: &str, record: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        record,
        reason: reason.into(),
    }
}
