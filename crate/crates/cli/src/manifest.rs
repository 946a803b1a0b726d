use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Written next to every output: enough to replay the run bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Fully resolved settings after merging flags, config file and defaults.
    pub settings: serde_json::Value,
    pub master_seed: Option<u64>,
    /// sha256 of every file read, keyed by path.
    pub inputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub flags: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new<S: Serialize>(subcommand: &str, settings: &S, master_seed: Option<u64>) -> CliResult<Self> {
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            settings: serde_json::to_value(settings)?,
            master_seed,
            inputs: BTreeMap::new(),
            flags: BTreeMap::new(),
        })
    }

    pub fn add_input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.insert(path.display().to_string(), file_digest(path)?);
        Ok(())
    }

    pub fn flag(&mut self, name: &str, value: impl Into<serde_json::Value>) {
        self.flags.insert(name.into(), value.into());
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        crate::io::write_json(&dir.join(MANIFEST_FILE), self)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Every recorded input still has the recorded digest.
    pub fn verify_inputs(&self) -> CliResult<()> {
        for (path, want) in &self.inputs {
            let got = file_digest(Path::new(path))?;
            if &got != want {
                return Err(CliError::input(format!(
                    "{path} changed since the run (sha256 {got}, recorded {want})"
                )));
            }
        }
        Ok(())
    }
}

pub fn file_digest(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Absolute form of an input path, so a manifest replays from any directory.
pub fn absolute(path: &Path) -> CliResult<PathBuf> {
    std::path::absolute(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn prepare_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))
}
