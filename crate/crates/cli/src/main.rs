mod args;
mod config;
mod density;
mod error;
mod fit;
mod hill;
mod io;
mod manifest;
mod scenario;
mod settings;
mod simulate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::de::DeserializeOwned;

use args::{Cli, Command};
use config::FileConfig;
use error::{CliError, CliResult};
use manifest::{file_digest, RunManifest};

/// Note which config file fed the run; its values are already folded into
/// the resolved settings, so a replay does not need it.
pub fn record_config(manifest: &mut RunManifest, config_file: Option<&Path>) -> CliResult<()> {
    if let Some(path) = config_file {
        manifest.flag("config_file", path.display().to_string());
        manifest.flag("config_sha256", file_digest(path)?);
    }
    Ok(())
}

fn settings<T: DeserializeOwned>(m: &RunManifest) -> CliResult<T> {
    serde_json::from_value(m.settings.clone())
        .map_err(|e| CliError::input(format!("manifest settings for {}: {e}", m.subcommand)))
}

fn replay(path: &Path, out: Option<PathBuf>) -> CliResult<()> {
    let m = RunManifest::read(path)?;
    m.verify_inputs()?;
    macro_rules! rerun {
        ($ty:ty, $module:ident) => {{
            let mut s: $ty = settings(&m)?;
            if let Some(dir) = out {
                s.out_dir = dir;
            }
            $module::run(&s, None)
        }};
    }
    match m.subcommand.as_str() {
        "fit" => rerun!(fit::FitSettings, fit),
        "simulate" => rerun!(simulate::SimulateSettings, simulate),
        "scenario" => rerun!(scenario::ScenarioSettings, scenario),
        "density-eval" => rerun!(density::DensitySettings, density),
        "hill-plot" => rerun!(hill::HillSettings, hill),
        other => Err(CliError::input(format!(
            "unknown subcommand {other:?} in {}",
            path.display()
        ))),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cfile = cli.config.as_deref();
    match cli.command {
        Command::Fit(a) => fit::run(&fit::FitSettings::resolve(&a, &cfg)?, cfile),
        Command::Simulate(a) => simulate::run(&simulate::SimulateSettings::resolve(&a, &cfg), cfile),
        Command::Scenario(a) => scenario::run(&scenario::ScenarioSettings::resolve(&a, &cfg)?, cfile),
        Command::DensityEval(a) => density::run(&density::DensitySettings::resolve(&a, &cfg)?, cfile),
        Command::HillPlot(a) => hill::run(&hill::HillSettings::resolve(&a, &cfg)?, cfile),
        Command::Replay(a) => replay(&a.manifest, a.out_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
