//! Run manifests: everything needed to reproduce a command's outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{io_err, CliError, Result};

pub const TOOL_NAME: &str = "roadtwin";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Manifest written next to every command's outputs. Regenerating with the
/// recorded seed, config and inputs yields byte-identical artifacts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: Value,
    /// SHA-256 of each input file.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scene: Option<roadtwin_core::twin::SceneManifest>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl RunManifest {
    pub fn new(command: &str, config: Value) -> RunManifest {
        RunManifest {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            seed: None,
            config,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            scene: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
        }
        let json = serde_json::to_string_pretty(self).map_err(|e| CliError::Json {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        fs::write(path, json).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Json {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
