//! Run manifests: every experiment directory gets a `manifest.json` with the
//! effective configuration, seed, wall-clock interval, artifact version, and
//! SHA-256 digests of every output file — enough to reproduce and verify the
//! run.  All files are written atomically (temp file + rename).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub artifact_version: String,
    pub kind: String,
    /// Seed actually used; absent for the deterministic tabular kinds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
    /// Effective configuration with all defaults materialized.
    pub config: serde_json::Value,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        write!(out, "{byte:02x}").expect("writing to a String cannot fail");
    }
    out
}

/// Writes `bytes` to `path` atomically: the content lands under a temporary
/// name in the same directory and is renamed into place, so readers never
/// observe a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

impl RunManifest {
    /// Serializes and writes the manifest into `dir`, returning its path.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_known_input() {
        // Standard test vector for the empty string.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn atomic_write_and_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("data.csv");
        write_atomic(&target, b"a,b\n1,2\n").unwrap();
        assert_eq!(fs::read(&target).unwrap(), b"a,b\n1,2\n");
        // No temp litter left behind.
        let names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["data.csv".to_string()]);

        let manifest = RunManifest {
            artifact_version: "0.1.0".into(),
            kind: "tcrit-table".into(),
            seed: None,
            started_at: "2026-01-01T00:00:00Z".into(),
            finished_at: "2026-01-01T00:00:01Z".into(),
            config: serde_json::json!({"kind": "tcrit-table", "d_max": 8}),
            outputs: vec![OutputDigest {
                file: "data.csv".into(),
                sha256: sha256_hex(b"a,b\n1,2\n"),
                bytes: 8,
            }],
        };
        manifest.write(dir.path()).unwrap();
        let back = RunManifest::read(dir.path()).unwrap();
        assert_eq!(back, manifest);
        // Seed is omitted from the JSON entirely when absent.
        let raw = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        assert!(!raw.contains("\"seed\""));
    }
}
