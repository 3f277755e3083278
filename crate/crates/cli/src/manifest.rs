//! Experiment manifests: one JSON file per run recording the command, its
//! full parameter set (seed included), worker count, output format, tool
//! version and the result payload. Replaying a manifest re-executes the
//! command from the stored parameters and must reproduce the payload
//! byte-for-byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub params: serde_json::Value,
    pub workers: u32,
    pub format: String,
    pub version: String,
    pub timestamp: String,
    pub result: String,
}

impl Manifest {
    pub fn new(
        command: &str,
        params: serde_json::Value,
        workers: u32,
        format: &str,
        result: &str,
    ) -> Self {
        Self {
            command: command.to_string(),
            params,
            workers,
            format: format.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            result: result.to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self).expect("manifest serializes"))
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read manifest {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed manifest: {e}"))
    }
}
