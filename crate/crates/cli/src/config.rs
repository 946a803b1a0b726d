//! Optional TOML defaults. Keys mirror the long flag names with underscores;
//! a flag given on the command line always wins.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::Prior;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub prior: Option<Prior>,
    pub identity_design: Option<bool>,
    pub truncated_tau: Option<bool>,
    pub burn: Option<usize>,
    pub keep: Option<usize>,
    pub thin: Option<usize>,
    pub seed: Option<u64>,
    pub rho2: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub rho: Option<f64>,
    pub snr: Option<f64>,
    pub replicates: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub priors: Option<Vec<Prior>>,
    pub tau: Option<f64>,
    pub xi: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub k_lo: Option<usize>,
    pub k_hi: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}
