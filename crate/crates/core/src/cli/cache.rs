//! Persistent cache of `C_d` scans.
//!
//! One JSON object per line. Each line carries its key, the tool version and
//! a SHA-256 checksum of the payload; lines that fail any check are ignored,
//! so a damaged file degrades to a cold cache. Writes go to a temporary file
//! in the same directory followed by an atomic rename.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compat_bounds::CdResult;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub d: u32,
    pub p: Option<u64>,
    pub scan_depth: usize,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let p = self.p.map_or_else(|| "none".to_string(), |p| p.to_string());
        let text = format!("cd;d={};p={};depth={}", self.d, p, self.scan_depth);
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub version: String,
    pub query: CacheKey,
    pub result: CdResult,
    pub checksum: String,
}

fn checksum(result: &CdResult) -> String {
    let body = serde_json::to_string(result).expect("CdResult serializes");
    hex::encode(Sha256::digest(body.as_bytes()))
}

impl CacheEntry {
    pub fn new(query: CacheKey, result: CdResult) -> Self {
        CacheEntry {
            key: query.digest(),
            version: TOOL_VERSION.to_string(),
            checksum: checksum(&result),
            query,
            result,
        }
    }

    fn is_valid(&self) -> bool {
        self.version == TOOL_VERSION
            && self.key == self.query.digest()
            && self.checksum == checksum(&self.result)
            && self.result.certificate.d == self.query.d
            && self.result.certificate.excluded_p == self.query.p
            && self.result.certificate.primes_scanned == self.query.scan_depth
    }
}

#[derive(Debug)]
pub struct CdCache {
    path: PathBuf,
    entries: BTreeMap<CacheKey, CdResult>,
}

impl CdCache {
    /// Loads whatever valid entries the file holds; a missing or unreadable
    /// file gives an empty cache.
    pub fn open(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let mut entries = BTreeMap::new();
        if let Ok(text) = fs::read_to_string(&path) {
            for line in text.lines() {
                let Ok(entry) = serde_json::from_str::<CacheEntry>(line) else {
                    continue;
                };
                if entry.is_valid() {
                    entries.insert(entry.query, entry.result);
                }
            }
        }
        CdCache { path, entries }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<&CdResult> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: CacheKey, result: CdResult) -> std::io::Result<()> {
        self.entries.insert(key, result);
        self.persist()
    }

    fn persist(&self) -> std::io::Result<()> {
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        for (key, result) in &self.entries {
            let entry = CacheEntry::new(*key, result.clone());
            serde_json::to_writer(&mut tmp, &entry)?;
            tmp.write_all(b"\n")?;
        }
        tmp.flush()?;
        tmp.persist(&self.path).map_err(|e| e.error)?;
        Ok(())
    }
}
