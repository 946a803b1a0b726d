//! Data, configuration and output types shared by both samplers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::distributions::PosteriorDesign;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    /// Normal-means model: `X = I`, `n = p`.
    Identity,
    Matrix(DMatrix<f64>),
}

/// Response plus design for `y = Xβ + σε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    y: DVector<f64>,
    design: Design,
}

impl RegressionData {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but the response has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.ncols() == 0 || y.is_empty() {
            return Err(Error::Dimension("empty design or response".into()));
        }
        check_finite(&y, "response")?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain {
                func: "RegressionData::new",
                detail: "design contains non-finite entries".into(),
            });
        }
        Ok(RegressionData {
            y,
            design: Design::Matrix(x),
        })
    }

    pub fn identity(y: DVector<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Dimension("empty response".into()));
        }
        check_finite(&y, "response")?;
        Ok(RegressionData {
            y,
            design: Design::Identity,
        })
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.design, Design::Identity)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        match &self.design {
            Design::Identity => self.y.len(),
            Design::Matrix(x) => x.ncols(),
        }
    }

    /// Explicit design matrix; the identity is materialized.
    pub fn x_dense(&self) -> DMatrix<f64> {
        match &self.design {
            Design::Identity => DMatrix::identity(self.n(), self.n()),
            Design::Matrix(x) => x.clone(),
        }
    }

    pub fn set_response(&mut self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.y.len() {
            return Err(Error::Dimension(format!(
                "response of length {} for n = {}",
                y.len(),
                self.n()
            )));
        }
        check_finite(y, "response")?;
        self.y.copy_from(y);
        Ok(())
    }

    /// `X β`.
    pub fn fitted(&self, beta: &DVector<f64>) -> DVector<f64> {
        match &self.design {
            Design::Identity => beta.clone(),
            Design::Matrix(x) => x * beta,
        }
    }

    /// `‖y - Xβ‖²`.
    pub fn rss(&self, beta: &DVector<f64>) -> f64 {
        match &self.design {
            Design::Identity => self.y.iter().zip(beta.iter()).map(|(a, b)| (a - b) * (a - b)).sum(),
            Design::Matrix(x) => {
                let mut r = self.y.clone();
                r.gemv(-1.0, x, beta, 1.0);
                r.norm_squared()
            }
        }
    }

    /// Gaussian log-likelihood `ln N(y | Xβ, σ²I)`.
    pub fn log_lik(&self, beta: &DVector<f64>, sigma2: f64) -> f64 {
        let n = self.n() as f64;
        -0.5 * n * (2.0 * std::f64::consts::PI * sigma2).ln() - 0.5 * self.rss(beta) / sigma2
    }

    /// Sample variance of `y` (denominator `n - 1`; 1 when `n = 1`).
    pub fn response_var(&self) -> f64 {
        sample_var(self.y.as_slice()).unwrap_or(1.0)
    }

    pub(crate) fn posterior_design(&self) -> PosteriorDesign {
        match &self.design {
            Design::Identity => PosteriorDesign::identity(&self.y),
            Design::Matrix(x) => PosteriorDesign::new(x, &self.y),
        }
    }
}

fn check_finite(v: &DVector<f64>, what: &str) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Domain {
            func: "RegressionData",
            detail: format!("{what} entry {i} is not finite"),
        });
    }
    Ok(())
}

/// `Σ(z - z̄)² / (n - 1)`, `None` for fewer than two values.
pub fn sample_var(z: &[f64]) -> Option<f64> {
    if z.len() < 2 {
        return None;
    }
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    Some(z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
}

/// Prior on the noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SigmaPrior {
    /// `π(σ²) ∝ 1/σ²`.
    #[default]
    Jeffreys,
    InvGamma {
        shape: f64,
        rate: f64,
    },
}

impl SigmaPrior {
    pub(crate) fn shape_rate(&self) -> (f64, f64) {
        match *self {
            SigmaPrior::Jeffreys => (0.0, 0.0),
            SigmaPrior::InvGamma { shape, rate } => (shape, rate),
        }
    }
}

/// Location of the log-normal prior on ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "mu", rename_all = "kebab-case")]
pub enum XiCenter {
    /// Recomputed every iteration from the Hill estimate of the current λ.
    #[default]
    Hill,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub burn: usize,
    /// Post-burn iterations; `keep / thin` of them are stored.
    pub keep: usize,
    pub thin: usize,
    pub seed: u64,
    pub stream: u64,
    pub rho2: f64,
    pub xi_floor: f64,
    pub sigma_prior: SigmaPrior,
    pub xi_center: XiCenter,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            burn: 10_000,
            keep: 10_000,
            thin: 100,
            seed: 0,
            stream: 0,
            rho2: 0.001,
            xi_floor: 0.5,
            sigma_prior: SigmaPrior::Jeffreys,
            xi_center: XiCenter::Hill,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Error::Domain {
            func: "ChainConfig",
            detail,
        };
        if self.thin == 0 || self.keep < self.thin {
            return Err(bad(format!(
                "need thin >= 1 and keep >= thin, got keep {} thin {}",
                self.keep, self.thin
            )));
        }
        if !(self.rho2 > 0.0 && self.rho2.is_finite()) {
            return Err(bad(format!("rho2 = {} must be positive", self.rho2)));
        }
        if !(self.xi_floor > 0.0 && self.xi_floor.is_finite()) {
            return Err(bad(format!("xi_floor = {} must be positive", self.xi_floor)));
        }
        if let SigmaPrior::InvGamma { shape, rate } = self.sigma_prior {
            if !(shape > 0.0 && rate > 0.0) {
                return Err(bad("inverse-gamma sigma prior needs positive shape and rate".into()));
            }
        }
        if let XiCenter::Fixed(mu) = self.xi_center {
            if !mu.is_finite() {
                return Err(bad("fixed xi center must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn kept_draws(&self) -> usize {
        self.keep / self.thin
    }
}

/// Counters accumulated over a chain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub ess_calls: usize,
    pub ess_proposals: u64,
    pub ess_max_proposals: usize,
    pub ess_capped: usize,
    pub degenerate_sigma_rate: usize,
    pub lambda_degenerate: usize,
    pub tau_degenerate: usize,
    pub factorization_failures: usize,
}

/// Thinned draws; matrices hold one row per kept draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub beta: DMatrix<f64>,
    pub sigma2: Vec<f64>,
    pub lambda: DMatrix<f64>,
    pub tau: Vec<f64>,
    /// `None` for the Horseshoe.
    pub xi: Option<Vec<f64>>,
    pub log_lik: Vec<f64>,
    pub diagnostics: Diagnostics,
    pub response_sd: f64,
}

impl ChainOutput {
    pub(crate) fn with_capacity(draws: usize, p: usize, has_xi: bool, response_sd: f64) -> Self {
        ChainOutput {
            beta: DMatrix::zeros(draws, p),
            sigma2: Vec::with_capacity(draws),
            lambda: DMatrix::zeros(draws, p),
            tau: Vec::with_capacity(draws),
            xi: has_xi.then(|| Vec::with_capacity(draws)),
            log_lik: Vec::with_capacity(draws),
            diagnostics: Diagnostics::default(),
            response_sd,
        }
    }

    pub fn draws(&self) -> usize {
        self.sigma2.len()
    }

    pub fn p(&self) -> usize {
        self.beta.ncols()
    }

    /// Prior variance of `β_j` over `σ²` at kept draw `row`: `λ_j²` for the
    /// GLT, `λ_j² τ²` for the Horseshoe.
    pub fn prior_scale2(&self, row: usize, j: usize) -> f64 {
        let l = self.lambda[(row, j)];
        match self.xi {
            Some(_) => l * l,
            None => l * l * self.tau[row] * self.tau[row],
        }
    }
}

/// Abort rule shared by both samplers: more than 1% of iterations failed to
/// factor the β precision.
pub(crate) fn check_abort(failures: usize, iterations: usize) -> Result<()> {
    if failures > 0 && failures * 100 > iterations.max(100) {
        return Err(Error::Aborted { failures, iterations });
    }
    Ok(())
}
