use std::collections::BTreeMap;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Result;

/// Provenance of one CLI run: parameters, timing and a SHA-256 per artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub u: Option<u64>,
    pub bounds: BTreeMap<String, Value>,
    pub erh_flag: bool,
    pub exhaustive: bool,
    pub notes: Vec<String>,
    pub started: String,
    pub finished: Option<String>,
    pub tool_version: String,
    pub outputs: BTreeMap<String, String>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            u: None,
            bounds: BTreeMap::new(),
            erh_flag: false,
            exhaustive: false,
            notes: Vec::new(),
            started: now(),
            finished: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn bound(&mut self, key: &str, v: impl Serialize) {
        self.bounds.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    /// Writes every artifact, then `manifest.json`, into `dir`.
    pub fn write_all(mut self, dir: &Path, files: &[(&str, String)]) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in files {
            std::fs::write(dir.join(name), body)?;
            self.outputs.insert(name.to_string(), sha256_hex(body.as_bytes()));
        }
        self.finished = Some(now());
        let mut s = serde_json::to_string_pretty(&self)?;
        s.push('\n');
        std::fs::write(dir.join("manifest.json"), s)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn writes_outputs_with_digests() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("test");
        m.param("u", 3);
        let m = m.write_all(dir.path(), &[("a.txt", "abc".to_string())]).unwrap();
        assert_eq!(m.outputs["a.txt"], sha256_hex(b"abc"));
        let back: RunManifest =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(back.outputs, m.outputs);
        assert!(back.finished.is_some());
    }
}
