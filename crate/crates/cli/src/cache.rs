//! Content-addressed stage cache stored as `<out>/.coword-cache.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_NAME: &str = ".coword-cache.json";
const MANIFEST_VERSION: u32 = 1;

/// What a stage reported the last time it ran.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub counts: BTreeMap<String, serde_json::Value>,
    pub warnings: Vec<String>,
}

impl StageReport {
    pub fn count(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.counts.insert(key.to_string(), v);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub key: String,
    /// Output file name → SHA-256 of its bytes.
    pub outputs: BTreeMap<String, String>,
    pub report: StageReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            version: MANIFEST_VERSION,
            stages: BTreeMap::new(),
        }
    }
}

impl Manifest {
    /// A missing, unreadable or foreign manifest counts as empty.
    pub fn load(out: &Path) -> Manifest {
        fs::read(out.join(MANIFEST_NAME))
            .ok()
            .and_then(|b| serde_json::from_slice::<Manifest>(&b).ok())
            .filter(|m| m.version == MANIFEST_VERSION)
            .unwrap_or_default()
    }

    pub fn save(&self, out: &Path) -> Result<(), CliError> {
        let path = out.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(path, e))
    }

    /// The record for `stage` if its key matches and every output on disk
    /// still has the recorded hash.
    pub fn valid(&self, stage: &str, key: &str, out: &Path) -> Option<&StageRecord> {
        let rec = self.stages.get(stage)?;
        if rec.key != key {
            return None;
        }
        let intact = rec
            .outputs
            .iter()
            .all(|(name, hash)| hash_file(&out.join(name)).ok().as_ref() == Some(hash));
        intact.then_some(rec)
    }
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> std::io::Result<String> {
    fs::read(path).map(|b| hash_bytes(&b))
}

/// Accumulates the parts of a stage's cache key.
#[derive(Default)]
pub struct KeyBuilder {
    hasher: Sha256,
}

impl KeyBuilder {
    pub fn new(stage: &str) -> Self {
        let mut k = KeyBuilder::default();
        k.part("stage", stage.as_bytes());
        k
    }

    pub fn part(&mut self, name: &str, bytes: &[u8]) {
        for chunk in [name.as_bytes(), bytes] {
            self.hasher.update((chunk.len() as u64).to_le_bytes());
            self.hasher.update(chunk);
        }
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_parts_are_length_delimited() {
        let key = |a: &str, b: &str| {
            let mut k = KeyBuilder::new("s");
            k.part(a, b.as_bytes());
            k.finish()
        };
        assert_ne!(key("ab", "c"), key("a", "bc"));
        assert_eq!(key("a", "b"), key("a", "b"));
    }

    #[test]
    fn tampered_output_invalidates_record() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("x.csv"), "1\n").unwrap();
        let mut m = Manifest::default();
        m.stages.insert(
            "s".into(),
            StageRecord {
                key: "k".into(),
                outputs: BTreeMap::from([("x.csv".into(), hash_bytes(b"1\n"))]),
                report: StageReport::default(),
            },
        );
        m.save(dir.path()).unwrap();
        let m = Manifest::load(dir.path());
        assert!(m.valid("s", "k", dir.path()).is_some());
        assert!(m.valid("s", "other", dir.path()).is_none());
        fs::write(dir.path().join("x.csv"), "2\n").unwrap();
        assert!(m.valid("s", "k", dir.path()).is_none());
    }
}
