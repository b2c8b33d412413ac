//! The run manifest embedded in every report: what ran, over which
//! inputs (by digest), under which resolved parameters.
//!
//! Deliberately timestamp-free so identical runs emit identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub format: String,
    pub inputs: Vec<InputDigest>,
    pub settings: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, format: &str) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            format: format.to_string(),
            inputs: Vec::new(),
            settings: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest { path: path.to_string(), sha256: sha256_hex(bytes) });
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.settings.insert(key.to_string(), value.to_string());
    }

    pub fn extend(&mut self, settings: &BTreeMap<String, String>) {
        for (k, v) in settings {
            self.settings.insert(k.clone(), v.clone());
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifests_with_identical_content_are_equal() {
        let build = || {
            let mut m = RunManifest::new("matrix", "csv");
            m.add_input("data/x.csv", b"1,2,3");
            m.set("v0", 10.698);
            m
        };
        assert_eq!(build(), build());
    }
}
