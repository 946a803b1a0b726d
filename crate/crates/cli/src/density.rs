use std::path::{Path, PathBuf};

use glt_core::densities::{glt_kappa_pdf, glt_marginal_beta, hs_kappa_pdf, hs_marginal_beta, GltMarginalParams};
use serde::{Deserialize, Serialize};

use crate::args::{DensityArgs, DensityKind};
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, CsvOut};
use crate::manifest::{prepare_out_dir, RunManifest};
use crate::settings::out_dir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySettings {
    pub kind: DensityKind,
    pub tau: f64,
    pub xi: f64,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub out_dir: PathBuf,
}

impl DensitySettings {
    pub fn resolve(args: &DensityArgs, cfg: &FileConfig) -> CliResult<Self> {
        let kappa = matches!(args.kind, DensityKind::GltKappa | DensityKind::HsKappa);
        let (lo, hi) = if kappa { (0.005, 0.995) } else { (-8.0, 8.0) };
        let s = DensitySettings {
            kind: args.kind,
            tau: args.tau.or(cfg.tau).unwrap_or(1.0),
            xi: args.xi.or(cfg.xi).unwrap_or(1.0),
            min: args.min.or(cfg.min).unwrap_or(lo),
            max: args.max.or(cfg.max).unwrap_or(hi),
            points: args.points.or(cfg.points).unwrap_or(321),
            out_dir: out_dir(&args.out_dir, cfg, "glt-density"),
        };
        if !s.min.is_finite() || !s.max.is_finite() || s.min >= s.max {
            return Err(CliError::input(format!("need min < max, got [{}, {}]", s.min, s.max)));
        }
        if kappa && !(s.min > 0.0 && s.max < 1.0) {
            return Err(CliError::input("kappa grid must lie inside (0, 1)"));
        }
        if s.points < 2 {
            return Err(CliError::input("need at least 2 grid points"));
        }
        Ok(s)
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(move |i| {
            if i + 1 == self.points {
                self.max
            } else {
                self.min + step * i as f64
            }
        })
    }
}

pub fn run(s: &DensitySettings, config_file: Option<&Path>) -> CliResult<()> {
    let mut manifest = RunManifest::new("density-eval", s, None)?;
    crate::record_config(&mut manifest, config_file)?;
    let glt = GltMarginalParams::new(s.tau, s.xi)?;
    let rows: Vec<(f64, f64)> = s
        .grid()
        .map(|x| {
            let v = match s.kind {
                DensityKind::GltBeta => glt_marginal_beta(x, &glt)?.or_infinity(),
                DensityKind::HsBeta => hs_marginal_beta(x, s.tau)?.or_infinity(),
                DensityKind::GltKappa => glt_kappa_pdf(x, s.tau, s.xi)?,
                DensityKind::HsKappa => hs_kappa_pdf(x, s.tau)?,
            };
            Ok((x, v))
        })
        .collect::<CliResult<_>>()?;
    prepare_out_dir(&s.out_dir)?;
    let var = match s.kind {
        DensityKind::GltBeta | DensityKind::HsBeta => "beta",
        _ => "kappa",
    };
    let mut csv = CsvOut::create(&s.out_dir.join("table.csv"), &[var.to_string(), "density".into()])?;
    for (x, v) in rows {
        csv.line(&[fmt_f64(x), fmt_f64(v)])?;
    }
    csv.finish()?;
    manifest.write(&s.out_dir)
}
