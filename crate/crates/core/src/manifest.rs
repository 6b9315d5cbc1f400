//! Checksums, atomic file writes and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::split::SplitMetadata;

pub const RUN_MANIFEST: &str = "run_manifest.json";
pub const SPLIT_MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    fs::read(path).map(|b| sha256_hex(&b)).map_err(|e| Error::io(path, e))
}

/// Write through a sibling temporary file and rename it into place, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

/// Tracks files written under one output root and their checksums.
#[derive(Debug)]
pub struct OutputSet {
    root: PathBuf,
    files: BTreeMap<String, String>,
}

impl OutputSet {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputSet {
            root: root.into(),
            files: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write `contents` at `relative` (forward slashes) and record its checksum.
    pub fn write(&mut self, relative: &str, contents: &[u8]) -> Result<String> {
        write_atomic(&self.root.join(relative), contents)?;
        let sum = sha256_hex(contents);
        self.files.insert(relative.to_string(), sum.clone());
        Ok(sum)
    }

    pub fn record(&mut self, relative: String, checksum: String) {
        self.files.insert(relative, checksum);
    }

    pub fn extend(&mut self, other: OutputSet) {
        self.files.extend(other.files);
    }

    pub fn files(&self) -> &BTreeMap<String, String> {
        &self.files
    }
}

/// Per-split record written next to its presentation directories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub metadata: SplitMetadata,
    /// `presentation/file` → SHA-256.
    pub files: BTreeMap<String, String>,
}

impl SplitManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub probes: Vec<String>,
    /// Paths relative to the manifest's directory → SHA-256.
    pub outputs: BTreeMap<String, String>,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs: BTreeMap::new(),
            seeds: Vec::new(),
            probes: Vec::new(),
            outputs: BTreeMap::new(),
            timestamp: timestamp(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), file_sha256(path)?);
        Ok(())
    }

    pub fn write(&mut self, outputs: &OutputSet) -> Result<PathBuf> {
        self.outputs = outputs.files().clone();
        let path = outputs.root().join(RUN_MANIFEST);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(RUN_MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Mismatched or missing outputs, as human-readable lines.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        let mut problems = Vec::new();
        for (rel, expected) in &self.outputs {
            match file_sha256(&dir.join(rel)) {
                Ok(actual) if &actual == expected => {}
                Ok(actual) => problems.push(format!("{rel}: checksum {actual}, manifest {expected}")),
                Err(e) => problems.push(format!("{rel}: {e}")),
            }
        }
        problems
    }
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn atomic_write_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::new(dir.path());
        out.write("a/b.txt", b"hello").unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("a/b.txt")).unwrap(), "hello");
        let mut m = RunManifest::new(vec!["test".into()]);
        m.write(&out).unwrap();
        let back = RunManifest::read(dir.path()).unwrap();
        assert_eq!(back, m);
        assert!(back.verify(dir.path()).is_empty());
        fs::write(dir.path().join("a/b.txt"), "changed").unwrap();
        assert_eq!(back.verify(dir.path()).len(), 1);
        let leftovers: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }
}
