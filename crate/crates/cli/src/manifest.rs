//! Run manifests: config hash, artifact digests, wall time, warnings.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use superwave_core::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical JSON of the resolved configuration.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_ms: u128,
    pub warnings: Vec<String>,
}

/// Accumulates artifacts and warnings over a run.
pub struct RunRecorder {
    command: String,
    config_hash: String,
    config: serde_json::Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    started: Instant,
}

pub fn config_hash(config: &serde_json::Value) -> String {
    // serde_json serializes maps in insertion order of the derived struct,
    // which is stable for a fixed build; that is canonical enough here.
    let text = serde_json::to_string(config).unwrap_or_default();
    hex(&Sha256::digest(text.as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<String> {
    let data =
        std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(hex(&Sha256::digest(&data)))
}

impl RunRecorder {
    pub fn new(command: &str, config: serde_json::Value, out_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| Error::io(out_dir.display().to_string(), e))?;
        let hash = config_hash(&config);
        let mut warnings = Vec::new();
        // Rerun detection: same config hash in an existing manifest means the
        // outputs below overwrite a previous identical run.
        let prior = out_dir.join(MANIFEST_NAME);
        if let Ok(text) = std::fs::read_to_string(&prior) {
            if let Ok(m) = serde_json::from_str::<RunManifest>(&text) {
                if m.config_hash == hash {
                    warnings.push(format!(
                        "identical configuration already ran in {}; overwriting its outputs",
                        out_dir.display()
                    ));
                }
            }
        }
        Ok(RunRecorder {
            command: command.to_string(),
            config_hash: hash,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            warnings,
            started: Instant::now(),
        })
    }

    pub fn add_input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Digest everything and write `manifest.json` alongside the outputs.
    pub fn finish(self, out_dir: &Path) -> Result<RunManifest> {
        let digests = |paths: &[PathBuf]| -> Result<Vec<FileDigest>> {
            paths
                .iter()
                .map(|p| {
                    Ok(FileDigest {
                        path: p.display().to_string(),
                        sha256: digest_file(p)?,
                    })
                })
                .collect()
        };
        let manifest = RunManifest {
            version: TOOL_VERSION.to_string(),
            command: self.command,
            config_hash: self.config_hash,
            config: self.config,
            inputs: digests(&self.inputs)?,
            outputs: digests(&self.outputs)?,
            wall_ms: self.started.elapsed().as_millis(),
            warnings: self.warnings,
        };
        let path = out_dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Numeric(format!("manifest serialization: {e}")))?;
        std::fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(manifest)
    }
}
