use std::path::{Path, PathBuf};

use glt_core::analysis::{normal_means_rb, rank_coefficients};
use glt_core::{run_chain, run_hs_chain, summarize, ChainOutput, Diagnostics, PosteriorSummary, RegressionData};
use serde::{Deserialize, Serialize};

use crate::args::{FitArgs, Prior};
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, read_matrix, read_vector, write_json, CsvOut};
use crate::manifest::{absolute, prepare_out_dir, RunManifest};
use crate::settings::{out_dir, ChainSettings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub prior: Prior,
    pub y: PathBuf,
    pub x: Option<PathBuf>,
    pub identity_design: bool,
    pub chain: ChainSettings,
    pub out_dir: PathBuf,
}

impl FitSettings {
    pub fn resolve(args: &FitArgs, cfg: &FileConfig) -> CliResult<Self> {
        let mut prior = args.prior.or(cfg.prior).unwrap_or(Prior::Glt);
        if args.truncated_tau || cfg.truncated_tau == Some(true) {
            prior = match prior {
                Prior::Glt => return Err(CliError::input("--truncated-tau applies to the horseshoe prior only")),
                _ => Prior::HorseshoeTruncated,
            };
        }
        let identity_design = args.identity_design || cfg.identity_design == Some(true);
        match (&args.x, identity_design) {
            (Some(_), true) => return Err(CliError::input("give either X.csv or --identity-design, not both")),
            (None, false) => return Err(CliError::input("missing X.csv (or pass --identity-design)")),
            _ => {}
        }
        Ok(FitSettings {
            prior,
            y: absolute(&args.y)?,
            x: args.x.as_deref().map(absolute).transpose()?,
            identity_design,
            chain: ChainSettings::resolve(&args.chain, cfg),
            out_dir: out_dir(&args.out_dir, cfg, "glt-fit"),
        })
    }
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    prior: Prior,
    n: usize,
    p: usize,
    identity_design: bool,
    response_sd: f64,
    summary: &'a PosteriorSummary,
    diagnostics: &'a Diagnostics,
}

pub fn load_data(s: &FitSettings) -> CliResult<RegressionData> {
    let y = read_vector(&s.y)?;
    match &s.x {
        None => Ok(RegressionData::identity(y)?),
        Some(xp) => {
            let x = read_matrix(xp)?;
            if x.nrows() != y.len() {
                return Err(CliError::input(format!(
                    "{} has {} rows but {} has {}",
                    xp.display(),
                    x.nrows(),
                    s.y.display(),
                    y.len()
                )));
            }
            Ok(RegressionData::new(x, y)?)
        }
    }
}

pub fn fit_chain(prior: Prior, data: &RegressionData, chain: &ChainSettings, stream: u64) -> CliResult<ChainOutput> {
    let config = chain.config(stream)?;
    // inputs are validated by now, so anything raised mid-chain is the sampler's
    match prior {
        Prior::Glt => run_chain(data, &config),
        Prior::Horseshoe => run_hs_chain(data, &config, false),
        Prior::HorseshoeTruncated => run_hs_chain(data, &config, true),
    }
    .map_err(|e| CliError::sampler(e.to_string()))
}

pub fn run(s: &FitSettings, config_file: Option<&Path>) -> CliResult<()> {
    let mut manifest = RunManifest::new("fit", s, Some(s.chain.seed))?;
    manifest.add_input(&s.y)?;
    if let Some(x) = &s.x {
        manifest.add_input(x)?;
    }
    crate::record_config(&mut manifest, config_file)?;
    manifest.flag("reduced_iterations", s.chain.reduced());

    let data = load_data(s)?;
    let out = fit_chain(s.prior, &data, &s.chain, 0)?;
    let summary = summarize(&out)?;

    prepare_out_dir(&s.out_dir)?;
    write_draws(&s.out_dir.join("draws.csv"), &out)?;
    write_json(
        &s.out_dir.join("summary.json"),
        &FitReport {
            prior: s.prior,
            n: data.n(),
            p: data.p(),
            identity_design: data.is_identity(),
            response_sd: out.response_sd,
            summary: &summary,
            diagnostics: &out.diagnostics,
        },
    )?;

    let ranked = rank_coefficients(&summary, data.p())?;
    let mut rk = CsvOut::create(
        &s.out_dir.join("ranking.csv"),
        &["rank", "index", "mean", "lower", "upper", "sign"].map(String::from),
    )?;
    for (i, r) in ranked.iter().enumerate() {
        rk.line(&[
            (i + 1).to_string(),
            (r.index + 1).to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.lower),
            fmt_f64(r.upper),
            r.sign.to_string(),
        ])?;
    }
    rk.finish()?;

    if data.is_identity() {
        let y = data.y().as_slice();
        let rb = normal_means_rb(&out, y)?;
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
        let mut sh = CsvOut::create(
            &s.out_dir.join("shrinkage.csv"),
            &["index", "y", "beta_hat", "beta_rb"].map(String::from),
        )?;
        for j in order {
            sh.line(&[
                (j + 1).to_string(),
                fmt_f64(y[j]),
                fmt_f64(summary.beta_mean[j]),
                fmt_f64(rb[j]),
            ])?;
        }
        sh.finish()?;
    }
    manifest.write(&s.out_dir)?;
    if summary.collapse {
        eprintln!("note: posterior collapsed (max |mean beta| tiny and mean tau < 1e-6)");
    }
    Ok(())
}

fn write_draws(path: &Path, out: &ChainOutput) -> CliResult<()> {
    let p = out.p();
    let mut header: Vec<String> = vec!["draw".into(), "sigma2".into(), "tau".into()];
    if out.xi.is_some() {
        header.push("xi".into());
    }
    header.push("log_lik".into());
    header.extend((1..=p).map(|j| format!("beta{j}")));
    header.extend((1..=p).map(|j| format!("lambda{j}")));
    let mut csv = CsvOut::create(path, &header)?;
    let mut cells = Vec::with_capacity(header.len());
    for i in 0..out.draws() {
        cells.clear();
        cells.push((i + 1).to_string());
        cells.push(fmt_f64(out.sigma2[i]));
        cells.push(fmt_f64(out.tau[i]));
        if let Some(xi) = &out.xi {
            cells.push(fmt_f64(xi[i]));
        }
        cells.push(fmt_f64(out.log_lik[i]));
        cells.extend(out.beta.row(i).iter().map(|v| fmt_f64(*v)));
        cells.extend(out.lambda.row(i).iter().map(|v| fmt_f64(*v)));
        csv.line(&cells)?;
    }
    csv.finish()
}
