use std::path::{Path, PathBuf};

use glt_core::hill::{calibrated_mu, hill_estimates, HillWindow};
use serde::{Deserialize, Serialize};

use crate::args::HillArgs;
use crate::config::FileConfig;
use crate::error::CliResult;
use crate::io::{fmt_f64, read_vector, write_json, CsvOut};
use crate::manifest::{absolute, prepare_out_dir, RunManifest};
use crate::settings::out_dir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillSettings {
    pub lambda: PathBuf,
    pub k_lo: Option<usize>,
    pub k_hi: Option<usize>,
    pub out_dir: PathBuf,
}

impl HillSettings {
    pub fn resolve(args: &HillArgs, cfg: &FileConfig) -> CliResult<Self> {
        Ok(HillSettings {
            lambda: absolute(&args.lambda)?,
            k_lo: args.k_lo.or(cfg.k_lo),
            k_hi: args.k_hi.or(cfg.k_hi),
            out_dir: out_dir(&args.out_dir, cfg, "glt-hill"),
        })
    }
}

#[derive(Serialize)]
struct HillReport {
    p: usize,
    k_lo: usize,
    k_hi: usize,
    windowed_mean: f64,
    mu_hat: f64,
}

pub fn run(s: &HillSettings, config_file: Option<&Path>) -> CliResult<()> {
    let mut manifest = RunManifest::new("hill-plot", s, None)?;
    manifest.add_input(&s.lambda)?;
    crate::record_config(&mut manifest, config_file)?;
    let lambda = read_vector(&s.lambda)?;
    let p = lambda.len();
    let est = hill_estimates(lambda.as_slice())?;
    let d = HillWindow::default_for(p)?;
    let w = HillWindow::new(s.k_lo.unwrap_or(d.k_lo), s.k_hi.unwrap_or(d.k_hi), p)?;
    let mu_hat = calibrated_mu(lambda.as_slice(), w)?;
    let inside = &est[w.k_lo - 2..=w.k_hi - 2];
    let windowed_mean = inside.iter().sum::<f64>() / inside.len() as f64;

    prepare_out_dir(&s.out_dir)?;
    let mut csv = CsvOut::create(
        &s.out_dir.join("hillplot.csv"),
        &["k", "xi_hat", "in_window"].map(String::from),
    )?;
    for (i, e) in est.iter().enumerate() {
        let k = i + 2;
        csv.line(&[
            k.to_string(),
            fmt_f64(*e),
            u8::from(k >= w.k_lo && k <= w.k_hi).to_string(),
        ])?;
    }
    csv.finish()?;
    write_json(
        &s.out_dir.join("hill.json"),
        &HillReport {
            p,
            k_lo: w.k_lo,
            k_hi: w.k_hi,
            windowed_mean,
            mu_hat,
        },
    )?;
    manifest.write(&s.out_dir)
}
