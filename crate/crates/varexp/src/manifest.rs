//! `manifest.json`: every output file with its size and SHA-256.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    /// Path relative to the output directory.
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn entry(dir: &Path, path: &Path) -> io::Result<Entry> {
    let data = fs::read(path)?;
    let file = path.strip_prefix(dir).unwrap_or(path).to_string_lossy().into_owned();
    Ok(Entry {
        file,
        sha256: hex::encode(Sha256::digest(&data)),
        bytes: data.len() as u64,
    })
}

/// Hashes `files` and writes `dir/manifest.json`, sorted by name.
pub fn write_manifest(dir: &Path, files: &[PathBuf]) -> io::Result<PathBuf> {
    let mut entries = files.iter().map(|p| entry(dir, p)).collect::<io::Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.file.cmp(&b.file));
    entries.dedup();
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&entries)? + "\n")?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> io::Result<Vec<Entry>> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}
