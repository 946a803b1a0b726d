use std::path::{Path, PathBuf};

use glt_core::datagen::{simulate, SimEnv};
use glt_core::distributions::ChainRng;
use serde::{Deserialize, Serialize};

use crate::args::{EnvFlags, SimulateArgs};
use crate::config::FileConfig;
use crate::error::CliResult;
use crate::io::{write_json, write_matrix, write_vector};
use crate::manifest::{prepare_out_dir, RunManifest};
use crate::settings::{out_dir, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSettings {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub rho: f64,
    pub snr: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// `(n, p, q, rho, snr)`, defaulting to `(100, 500, 1% of p, 0, 5)`.
pub fn resolve_env(flags: &EnvFlags, cfg: &FileConfig) -> (usize, usize, Option<usize>, f64, f64) {
    (
        flags.n.or(cfg.n).unwrap_or(100),
        flags.p.or(cfg.p).unwrap_or(500),
        flags.q.or(cfg.q),
        flags.rho.or(cfg.rho).unwrap_or(0.0),
        flags.snr.or(cfg.snr).unwrap_or(5.0),
    )
}

/// One percent of the coefficients, at least one.
pub fn default_q(p: usize) -> usize {
    ((p as f64 * 0.01).round() as usize).max(1)
}

impl SimulateSettings {
    pub fn resolve(args: &SimulateArgs, cfg: &FileConfig) -> Self {
        let (n, p, q, rho, snr) = resolve_env(&args.env, cfg);
        SimulateSettings {
            n,
            p,
            q: q.unwrap_or_else(|| default_q(p)),
            rho,
            snr,
            seed: args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            out_dir: out_dir(&args.out_dir, cfg, "glt-simulate"),
        }
    }
}

#[derive(Serialize)]
struct Meta {
    n: usize,
    p: usize,
    q: usize,
    rho: f64,
    snr: f64,
    sigma0: f64,
    seed: u64,
}

pub fn run(s: &SimulateSettings, config_file: Option<&Path>) -> CliResult<()> {
    let mut manifest = RunManifest::new("simulate", s, Some(s.seed))?;
    crate::record_config(&mut manifest, config_file)?;
    let env = SimEnv::new(s.n, s.p, s.q, s.rho, s.snr)?;
    let sim = simulate(&env, &mut ChainRng::new(s.seed, 0))?;
    prepare_out_dir(&s.out_dir)?;
    write_vector(&s.out_dir.join("y.csv"), "y", sim.data.y().as_slice())?;
    write_matrix(&s.out_dir.join("X.csv"), "x", &sim.data.x_dense())?;
    write_vector(&s.out_dir.join("truth.csv"), "beta", sim.truth.as_slice())?;
    write_json(
        &s.out_dir.join("meta.json"),
        &Meta {
            n: s.n,
            p: s.p,
            q: s.q,
            rho: s.rho,
            snr: s.snr,
            sigma0: sim.sigma0,
            seed: s.seed,
        },
    )?;
    manifest.write(&s.out_dir)
}
