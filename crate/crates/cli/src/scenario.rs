//! Replicated simulation study. Every (grid point, replicate) owns fixed RNG
//! streams under the master seed, so results do not depend on how many
//! workers run them; the reduce walks jobs in index order.

use std::path::{Path, PathBuf};

use glt_core::analysis::{mse_metrics, quantile_sorted};
use glt_core::datagen::{simulate, SimEnv};
use glt_core::distributions::ChainRng;
use glt_core::summarize;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{Prior, ScenarioArgs};
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::fit::fit_chain;
use crate::io::{fmt_f64, CsvOut};
use crate::manifest::{prepare_out_dir, RunManifest};
use crate::settings::{out_dir, ChainSettings};
use crate::simulate::{default_q, resolve_env};

/// Replicate count that counts as a full-size study.
pub const FULL_SCALE_REPLICATES: usize = 50;
/// A run fails when more than this fraction of replicates abort.
pub const MAX_FAILED_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSettings {
    pub scenario: u8,
    pub replicates: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub rho: f64,
    pub snr: f64,
    pub grid: Vec<f64>,
    pub priors: Vec<Prior>,
    pub chain: ChainSettings,
    pub out_dir: PathBuf,
}

/// Sparsity grid from 0.1% to about 10% of `p`, with fixed lists for the
/// two standard sizes.
pub fn default_q_grid(p: usize) -> Vec<f64> {
    match p {
        500 => vec![1., 6., 11., 16., 22., 27., 32., 37., 43., 48.],
        1000 => vec![1., 11., 22., 32., 43., 53., 64., 74., 85., 95.],
        _ => {
            let lo = (0.001 * p as f64).round().max(1.0);
            let hi = (0.095 * p as f64).round().max(lo);
            let mut g: Vec<f64> = (0..10).map(|i| (lo + (hi - lo) * i as f64 / 9.0).round()).collect();
            g.dedup();
            g
        }
    }
}

fn grid_name(scenario: u8) -> &'static str {
    match scenario {
        1 => "q",
        2 => "rho",
        _ => "snr",
    }
}

impl ScenarioSettings {
    pub fn resolve(args: &ScenarioArgs, cfg: &FileConfig) -> CliResult<Self> {
        let (n, p, q, rho, snr) = resolve_env(&args.env, cfg);
        let grid = args
            .grid
            .clone()
            .or_else(|| cfg.grid.clone())
            .unwrap_or_else(|| match args.scenario {
                1 => default_q_grid(p),
                2 => vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
                _ => vec![2.0, 4.0, 6.0, 8.0, 10.0],
            });
        let s = ScenarioSettings {
            scenario: args.scenario,
            replicates: args.replicates.or(cfg.replicates).unwrap_or(10),
            n,
            p,
            q: q.unwrap_or_else(|| default_q(p)),
            rho,
            snr,
            grid,
            priors: args
                .priors
                .clone()
                .or_else(|| cfg.priors.clone())
                .unwrap_or_else(|| vec![Prior::Glt, Prior::Horseshoe]),
            chain: ChainSettings::resolve(&args.chain, cfg),
            out_dir: out_dir(&args.out_dir, cfg, "glt-scenario"),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> CliResult<()> {
        if self.replicates == 0 || self.grid.is_empty() || self.priors.is_empty() {
            return Err(CliError::input("need at least one replicate, grid value and prior"));
        }
        for &g in &self.grid {
            self.env_at(g)?;
        }
        self.chain.config(0)?;
        Ok(())
    }

    fn env_at(&self, g: f64) -> CliResult<SimEnv> {
        let (q, rho, snr) = match self.scenario {
            1 => {
                if !(g >= 0.0 && g.fract() == 0.0) {
                    return Err(CliError::input(format!(
                        "q grid value {g} is not a non-negative integer"
                    )));
                }
                (g as usize, self.rho, self.snr)
            }
            2 => (self.q, g, self.snr),
            _ => (self.q, self.rho, g),
        };
        Ok(SimEnv::new(self.n, self.p, q, rho, snr)?)
    }
}

#[derive(Debug, Clone)]
struct FitRow {
    prior: Prior,
    outcome: Result<Metrics, String>,
}

#[derive(Debug, Clone, Copy)]
struct Metrics {
    mse: f64,
    mse_s: f64,
    mse_n: f64,
    tau: f64,
    xi: f64,
    collapse: bool,
}

#[derive(Debug, Clone)]
struct Job {
    grid_index: usize,
    replicate: usize,
}

impl Job {
    /// Stream block: data on `8k`, each prior on `8k + 1 + id`.
    fn key(&self) -> u64 {
        ((self.grid_index as u64) << 32) | self.replicate as u64
    }
}

fn run_job(s: &ScenarioSettings, job: &Job) -> Result<Vec<FitRow>, String> {
    let env = s.env_at(s.grid[job.grid_index]).map_err(|e| e.message)?;
    let mut rng = ChainRng::new(s.chain.seed, 8 * job.key());
    let sim = simulate(&env, &mut rng).map_err(|e| e.to_string())?;
    let truth = sim.truth.as_slice();
    Ok(s.priors
        .iter()
        .map(|&prior| {
            let outcome = fit_chain(prior, &sim.data, &s.chain, 8 * job.key() + 1 + prior_id(prior))
                .and_then(|out| {
                    let sm = summarize(&out)?;
                    let m = mse_metrics(&sm.beta_mean, truth, env.q)?;
                    Ok(Metrics {
                        mse: m.mse,
                        mse_s: m.mse_s,
                        mse_n: m.mse_n,
                        tau: sm.tau_mean,
                        xi: sm.xi_mean.unwrap_or(f64::NAN),
                        collapse: sm.collapse,
                    })
                })
                .map_err(|e| e.message);
            FitRow { prior, outcome }
        })
        .collect())
}

/// Fixed per prior, so dropping one from `--priors` leaves the others' draws alone.
fn prior_id(prior: Prior) -> u64 {
    match prior {
        Prior::Glt => 0,
        Prior::Horseshoe => 1,
        Prior::HorseshoeTruncated => 2,
    }
}

/// Worker count: `GLT_THREADS` if set, capped by the available cores.
pub fn worker_count() -> CliResult<usize> {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("GLT_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n.min(cores)),
            _ => Err(CliError::input(format!(
                "GLT_THREADS = {v:?} is not a positive integer"
            ))),
        },
        Err(_) => Ok(cores),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.retain(|x| !x.is_nan());
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

pub fn run(s: &ScenarioSettings, config_file: Option<&Path>) -> CliResult<()> {
    let mut manifest = RunManifest::new("scenario", s, Some(s.chain.seed))?;
    crate::record_config(&mut manifest, config_file)?;
    manifest.flag("paper_scale", s.replicates == FULL_SCALE_REPLICATES);
    manifest.flag("reduced_iterations", s.chain.reduced());

    let jobs: Vec<Job> = (0..s.grid.len())
        .flat_map(|g| {
            (0..s.replicates).map(move |r| Job {
                grid_index: g,
                replicate: r,
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| CliError::input(e.to_string()))?;
    let results: Vec<Result<Vec<FitRow>, String>> = pool.install(|| jobs.par_iter().map(|j| run_job(s, j)).collect());

    prepare_out_dir(&s.out_dir)?;
    let var = grid_name(s.scenario);
    let mut reps = CsvOut::create(
        &s.out_dir.join("replicates.csv"),
        &[
            var,
            "replicate",
            "prior",
            "status",
            "mse",
            "mse_s",
            "mse_n",
            "tau_mean",
            "xi_mean",
            "collapse",
        ]
        .map(String::from),
    )?;
    let mut aborted = 0usize;
    for (job, res) in jobs.iter().zip(&results) {
        let g = fmt_f64(s.grid[job.grid_index]);
        let rows = match res {
            Ok(rows) => rows,
            Err(msg) => {
                aborted += 1;
                eprintln!(
                    "{var} = {} replicate {}: data generation failed: {msg}",
                    s.grid[job.grid_index], job.replicate
                );
                continue;
            }
        };
        if rows.iter().any(|r| r.outcome.is_err()) {
            aborted += 1;
        }
        for row in rows {
            let mut cells = vec![g.clone(), job.replicate.to_string(), row.prior.name().to_string()];
            match &row.outcome {
                Ok(m) => {
                    cells.push("ok".into());
                    cells.extend([m.mse, m.mse_s, m.mse_n, m.tau, m.xi].map(fmt_f64));
                    cells.push(u8::from(m.collapse).to_string());
                }
                Err(msg) => {
                    eprintln!(
                        "{var} = {} replicate {} {}: {msg}",
                        s.grid[job.grid_index],
                        job.replicate,
                        row.prior.name()
                    );
                    cells.push("aborted".into());
                    cells.extend(std::iter::repeat_n("NA".to_string(), 6));
                }
            }
            reps.line(&cells)?;
        }
    }
    reps.finish()?;

    let mut med = CsvOut::create(
        &s.out_dir.join("medians.csv"),
        &[
            var,
            "prior",
            "ok",
            "aborted",
            "collapsed",
            "median_mse",
            "median_mse_s",
            "median_mse_n",
            "median_tau",
            "median_xi",
        ]
        .map(String::from),
    )?;
    for (g, &value) in s.grid.iter().enumerate() {
        for &prior in &s.priors {
            let ok: Vec<Metrics> = jobs
                .iter()
                .zip(&results)
                .filter(|(j, _)| j.grid_index == g)
                .filter_map(|(_, r)| r.as_ref().ok())
                .flat_map(|rows| rows.iter().filter(|r| r.prior == prior))
                .filter_map(|r| r.outcome.as_ref().ok().copied())
                .collect();
            let col = |f: fn(&Metrics) -> f64| median(ok.iter().map(f).collect());
            med.line(&[
                fmt_f64(value),
                prior.name().to_string(),
                ok.len().to_string(),
                (s.replicates - ok.len()).to_string(),
                ok.iter().filter(|m| m.collapse).count().to_string(),
                fmt_f64(col(|m| m.mse)),
                fmt_f64(col(|m| m.mse_s)),
                fmt_f64(col(|m| m.mse_n)),
                fmt_f64(col(|m| m.tau)),
                fmt_f64(col(|m| m.xi)),
            ])?;
        }
    }
    med.finish()?;
    manifest.write(&s.out_dir)?;

    check_aborted(aborted, jobs.len())
}

/// Exit with a sampler failure once more than the allowed share aborted.
pub fn check_aborted(aborted: usize, total: usize) -> CliResult<()> {
    if aborted as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(CliError::sampler(format!(
            "{aborted} of {total} replicates aborted (limit {:.0}%)",
            100.0 * MAX_FAILED_FRACTION
        )));
    }
    Ok(())
}
