//! Run manifests: what was run, with which configuration, producing which
//! files. No timestamps, so identical runs give identical manifests.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the canonical JSON form of `value`.
pub fn digest_of<T: Serialize>(value: &T) -> String {
    sha256_hex(serde_json::to_string(value).expect("value serializes").as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config_digest: String,
    /// The configuration itself, for replay.
    pub config: Value,
    /// Output file (relative path) to sha256.
    pub outputs: BTreeMap<String, String>,
    #[serde(default)]
    pub summary: Value,
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, seed: Option<u64>, config: &C) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config_digest: digest_of(config),
            config: serde_json::to_value(config).expect("config serializes"),
            outputs: BTreeMap::new(),
            summary: Value::Null,
        }
    }

    /// Record the digest of `dir/rel`.
    pub fn add_output(&mut self, dir: &Path, rel: &str) -> std::io::Result<()> {
        let bytes = std::fs::read(dir.join(rel))?;
        self.outputs.insert(rel.to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        std::fs::write(dir.join(MANIFEST_FILE), text)
    }

    pub fn read(dir: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = serde_json::json!({"seed": 1});
        assert_eq!(digest_of(&a), digest_of(&a.clone()));
        assert_ne!(digest_of(&a), digest_of(&serde_json::json!({"seed": 2})));
    }

    #[test]
    fn write_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("out.txt"), "x").unwrap();
        let mut m = Manifest::new("test", Some(1), &serde_json::json!({"k": 1}));
        m.add_output(dir.path(), "out.txt").unwrap();
        m.write(dir.path()).unwrap();
        assert_eq!(Manifest::read(dir.path()).unwrap(), m);
    }
}
