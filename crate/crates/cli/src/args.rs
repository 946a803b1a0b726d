use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "glt", version, about = "GLT and Horseshoe shrinkage regression")]
pub struct Cli {
    /// TOML file with default flag values; command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one chain to y.csv (and X.csv, or an identity design).
    Fit(FitArgs),
    /// Draw a synthetic regression dataset.
    Simulate(SimulateArgs),
    /// Replicated simulation study over one environment grid.
    Scenario(ScenarioArgs),
    /// Tabulate a marginal prior density on a grid.
    DensityEval(DensityArgs),
    /// Hill estimates for every k from a column of positive values.
    HillPlot(HillArgs),
    /// Re-run a command from its manifest.json.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prior {
    Glt,
    Horseshoe,
    HorseshoeTruncated,
}

impl Prior {
    pub fn name(self) -> &'static str {
        match self {
            Prior::Glt => "glt",
            Prior::Horseshoe => "horseshoe",
            Prior::HorseshoeTruncated => "horseshoe-truncated",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChainFlags {
    #[arg(long)]
    pub burn: Option<usize>,
    #[arg(long)]
    pub keep: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Variance of the log-normal prior on the tail index.
    #[arg(long)]
    pub rho2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Response, one column with a header.
    pub y: PathBuf,
    /// Design matrix, n rows by p columns with a header.
    pub x: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub prior: Option<Prior>,
    /// Treat the response as normal means (X = I).
    #[arg(long)]
    pub identity_design: bool,
    /// Restrict the Horseshoe global scale to tau > 1/p.
    #[arg(long)]
    pub truncated_tau: bool,
    #[command(flatten)]
    pub chain: ChainFlags,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EnvFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub snr: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub env: EnvFlags,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// 1: varied q, 2: varied rho, 3: varied SNR.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
    pub scenario: u8,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Replace the scenario's grid (q, rho or SNR values).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Priors to fit on every replicate.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub priors: Option<Vec<Prior>>,
    #[command(flatten)]
    pub env: EnvFlags,
    #[command(flatten)]
    pub chain: ChainFlags,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    GltBeta,
    GltKappa,
    HsBeta,
    HsKappa,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(value_enum)]
    pub kind: DensityKind,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HillArgs {
    /// One column of positive values with a header.
    pub lambda: PathBuf,
    #[arg(long)]
    pub k_lo: Option<usize>,
    #[arg(long)]
    pub k_hi: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
