//! Posterior summaries and evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::ChainOutput;

pub const MIN_DRAWS: usize = 20;

/// Collapse: every |posterior mean β_j| below this fraction of sd(y) ...
pub const COLLAPSE_BETA_FRACTION: f64 = 0.01;
/// ... and the posterior mean of τ below this.
pub const COLLAPSE_TAU: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub draws: usize,
    pub beta_mean: Vec<f64>,
    pub beta_lower: Vec<f64>,
    pub beta_upper: Vec<f64>,
    pub sigma2_mean: f64,
    pub tau_mean: f64,
    pub tau_median: f64,
    pub xi_mean: Option<f64>,
    pub cor_lambda_tau: Vec<f64>,
    pub cor_lambda_xi: Option<Vec<f64>>,
    /// Some correlation had a constant argument and was reported as 0.
    pub degenerate_correlation: bool,
    pub collapse: bool,
}

/// Quantile by linear interpolation between order statistics
/// (`h = (n-1)p`); `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * prob;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson correlation; `None` when either argument is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa > 0.0 && sbb > 0.0 {
        Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
    } else {
        None
    }
}

pub fn summarize(chain: &ChainOutput) -> Result<PosteriorSummary> {
    let s = chain.draws();
    if s < MIN_DRAWS {
        return Err(Error::InsufficientDraws {
            needed: MIN_DRAWS,
            got: s,
        });
    }
    let p = chain.p();
    let mut degenerate = false;
    let mut beta_mean = Vec::with_capacity(p);
    let mut beta_lower = Vec::with_capacity(p);
    let mut beta_upper = Vec::with_capacity(p);
    let mut cor_lambda_tau = Vec::with_capacity(p);
    let mut cor_lambda_xi = chain.xi.as_ref().map(|_| Vec::with_capacity(p));
    let mut sorted = vec![0.0; s];
    for j in 0..p {
        let col = chain.beta.column(j);
        sorted.copy_from_slice(col.as_slice());
        beta_mean.push(mean(&sorted));
        sorted.sort_by(f64::total_cmp);
        beta_lower.push(quantile_sorted(&sorted, 0.025));
        beta_upper.push(quantile_sorted(&sorted, 0.975));

        let lam = chain.lambda.column(j);
        let c = pearson(lam.as_slice(), &chain.tau);
        degenerate |= c.is_none();
        cor_lambda_tau.push(c.unwrap_or(0.0));
        if let (Some(xi), Some(out)) = (chain.xi.as_ref(), cor_lambda_xi.as_mut()) {
            let c = pearson(lam.as_slice(), xi);
            degenerate |= c.is_none();
            out.push(c.unwrap_or(0.0));
        }
    }
    let tau_mean = mean(&chain.tau);
    let mut tau_sorted = chain.tau.clone();
    tau_sorted.sort_by(f64::total_cmp);
    let max_abs = beta_mean.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let collapse = max_abs < COLLAPSE_BETA_FRACTION * chain.response_sd && tau_mean < COLLAPSE_TAU;
    Ok(PosteriorSummary {
        draws: s,
        beta_mean,
        beta_lower,
        beta_upper,
        sigma2_mean: mean(&chain.sigma2),
        tau_mean,
        tau_median: quantile_sorted(&tau_sorted, 0.5),
        xi_mean: chain.xi.as_ref().map(|x| mean(x)),
        cor_lambda_tau,
        cor_lambda_xi,
        degenerate_correlation: degenerate,
        collapse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseMetrics {
    pub mse: f64,
    /// Mean over the signals; 0 when `q = 0`.
    pub mse_s: f64,
    /// Mean over the nulls; 0 when `q = p`.
    pub mse_n: f64,
}

/// Total, signal and noise mean squared errors for a truth of `q` leading
/// ones followed by zeros.
pub fn mse_metrics(beta_hat: &[f64], truth: &[f64], q: usize) -> Result<MseMetrics> {
    let p = truth.len();
    if beta_hat.len() != p {
        return Err(Error::Dimension(format!(
            "{} estimates for {} coefficients",
            beta_hat.len(),
            p
        )));
    }
    if q > p {
        return Err(Error::Structure(format!("q = {q} exceeds p = {p}")));
    }
    if let Some(j) = (0..p).find(|&j| truth[j] != if j < q { 1.0 } else { 0.0 }) {
        return Err(Error::Structure(format!("entry {j} is {}", truth[j])));
    }
    let ss_s: f64 = beta_hat[..q].iter().map(|b| (b - 1.0) * (b - 1.0)).sum();
    let ss_n: f64 = beta_hat[q..].iter().map(|b| b * b).sum();
    Ok(MseMetrics {
        mse: (ss_s + ss_n) / p as f64,
        mse_s: if q > 0 { ss_s / q as f64 } else { 0.0 },
        mse_n: if q < p { ss_n / (p - q) as f64 } else { 0.0 },
    })
}

/// Rao-Blackwellized posterior means for an identity design: the average
/// over draws of `E[β_j | λ, τ, y] = y_j d_j / (1 + d_j)`. Always strictly
/// inside `(0, y_j)`, and far less noisy than the draw mean near `y_j = 0`.
pub fn normal_means_rb(chain: &ChainOutput, y: &[f64]) -> Result<Vec<f64>> {
    let p = chain.p();
    if y.len() != p {
        return Err(Error::Dimension(format!("{} responses for {p} coefficients", y.len())));
    }
    let draws = chain.draws();
    if draws == 0 {
        return Err(Error::Dimension("no draws".into()));
    }
    Ok((0..p)
        .map(|j| {
            let s: f64 = (0..draws).map(|r| 1.0 / (1.0 + 1.0 / chain.prior_scale2(r, j))).sum();
            y[j] * s / draws as f64
        })
        .collect())
}

/// `(y_j, β̂_j)` sorted by `y_j`.
pub fn shrinkage_pairs(y: &[f64], beta_hat: &[f64]) -> Result<Vec<(f64, f64)>> {
    if y.len() != beta_hat.len() {
        return Err(Error::Dimension(format!(
            "{} responses for {} estimates",
            y.len(),
            beta_hat.len()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = y.iter().copied().zip(beta_hat.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCoef {
    pub index: usize,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub sign: i8,
}

/// Top `k` coefficients by |posterior mean|, ties by index.
pub fn rank_coefficients(summary: &PosteriorSummary, top_k: usize) -> Result<Vec<RankedCoef>> {
    let p = summary.beta_mean.len();
    if top_k > p {
        return Err(domain("rank_coefficients", format!("top_k = {top_k} exceeds p = {p}")));
    }
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| summary.beta_mean[b].abs().total_cmp(&summary.beta_mean[a].abs()));
    Ok(idx
        .into_iter()
        .take(top_k)
        .map(|j| {
            let m = summary.beta_mean[j];
            RankedCoef {
                index: j,
                mean: m,
                lower: summary.beta_lower[j],
                upper: summary.beta_upper[j],
                sign: if m > 0.0 {
                    1
                } else if m < 0.0 {
                    -1
                } else {
                    0
                },
            }
        })
        .collect())
}
