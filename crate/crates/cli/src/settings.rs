//! Resolved run settings: flag, else config file, else default. These are
//! what the manifest records and what a replay re-executes.

use std::path::PathBuf;

use glt_core::ChainConfig;
use serde::{Deserialize, Serialize};

use crate::args::ChainFlags;
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSettings {
    pub burn: usize,
    pub keep: usize,
    pub thin: usize,
    pub seed: u64,
    pub rho2: f64,
}

impl ChainSettings {
    pub fn resolve(flags: &ChainFlags, cfg: &FileConfig) -> Self {
        let d = ChainConfig::default();
        ChainSettings {
            burn: flags.burn.or(cfg.burn).unwrap_or(d.burn),
            keep: flags.keep.or(cfg.keep).unwrap_or(d.keep),
            thin: flags.thin.or(cfg.thin).unwrap_or(d.thin),
            seed: flags.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            rho2: flags.rho2.or(cfg.rho2).unwrap_or(d.rho2),
        }
    }

    /// Validated chain configuration on the given stream.
    pub fn config(&self, stream: u64) -> CliResult<ChainConfig> {
        let c = ChainConfig {
            burn: self.burn,
            keep: self.keep,
            thin: self.thin,
            seed: self.seed,
            stream,
            rho2: self.rho2,
            ..ChainConfig::default()
        };
        c.validate()?;
        if c.kept_draws() < glt_core::analysis::MIN_DRAWS {
            return Err(CliError::input(format!(
                "keep / thin = {} kept draws; at least {} are needed for a summary",
                c.kept_draws(),
                glt_core::analysis::MIN_DRAWS
            )));
        }
        Ok(c)
    }

    /// Fewer total iterations than the default 10000 + 10000.
    pub fn reduced(&self) -> bool {
        let d = ChainConfig::default();
        self.burn + self.keep < d.burn + d.keep
    }
}

pub fn out_dir(flag: &Option<PathBuf>, cfg: &FileConfig, default: &str) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(default))
}
