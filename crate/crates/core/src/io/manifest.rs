use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::{Result, WdsError};

/// Content hash in the style of a git blob id, over SHA-256:
/// `sha256("blob <len>\0" ‖ content)`, lowercase hex.
pub fn content_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub hash: String,
}

/// Record of one run: the resolved configuration, its seed, and hashes of
/// the configuration and every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub command: String,
    pub seed: u64,
    pub tool_version: String,
    pub spec_hash: String,
    pub outputs: Vec<OutputFile>,
    /// The resolved experiment, as structured text.
    pub spec: String,
}

impl RunManifest {
    pub fn new<T: Serialize>(name: &str, command: &str, seed: u64, spec: &T) -> Result<Self> {
        let spec = toml::to_string(spec).map_err(|e| WdsError::Format(e.to_string()))?;
        Ok(RunManifest {
            name: name.to_string(),
            command: command.to_string(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            spec_hash: content_hash(spec.as_bytes()),
            outputs: Vec::new(),
            spec,
        })
    }

    /// Hashes a written output file and lists it.
    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.outputs.push(OutputFile {
            path: path.display().to_string(),
            hash: content_hash(&bytes),
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| WdsError::Format(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| WdsError::Format(e.message().to_string()))
    }
}
