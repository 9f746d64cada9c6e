//! Number formatting, atomic file output and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use uscpol::SystemParams;

use crate::Task;

/// 12 significant digits in scientific notation; `nan`/`inf` spelled out.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Accumulates a CSV table with `\n` line endings.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Table { text }
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(&c);
        }
        self.text.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        self.row(values.iter().map(|&v| num(v)));
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputHash {
    pub file: String,
    pub sha256: String,
}

/// Writes files into one directory through temp files and renames, and
/// remembers their hashes.
pub struct OutputDir {
    dir: PathBuf,
    hashes: Vec<OutputHash>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputDir { dir: dir.to_path_buf(), hashes: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let sha256 = write_atomic(&self.dir.join(name), bytes)?;
        self.hashes.push(OutputHash { file: name.to_string(), sha256 });
        Ok(())
    }

    /// Records a file written elsewhere (e.g. from worker threads).
    pub fn record(&mut self, name: String, sha256: String) {
        self.hashes.push(OutputHash { file: name, sha256 });
    }

    pub fn finish(mut self) -> Vec<OutputHash> {
        self.hashes.sort_by(|a, b| a.file.cmp(&b.file));
        self.hashes
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<String> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(sha256_hex(bytes))
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub task: Task,
    pub format: crate::Format,
    /// Canonical config text with every default filled in.
    pub config: String,
    pub params: SystemParams,
    pub grids: BTreeMap<String, String>,
    pub settings: serde_json::Value,
    pub diagnostics: serde_json::Value,
    pub outputs: Vec<OutputHash>,
}

pub const MANIFEST: &str = "manifest.json";
