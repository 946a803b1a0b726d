//! Hill estimator of the GPD shape and the log-mean calibration that centers
//! the elliptical slice sampler for `ln ξ`.

use crate::error::{domain, Result};

/// Floor on the window-averaged Hill estimate before taking its log.
pub const HILL_FLOOR: f64 = 1e-8;

/// Inclusive range `k_lo..=k_hi` of upper order statistics averaged over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HillWindow {
    pub k_lo: usize,
    pub k_hi: usize,
}

impl HillWindow {
    pub fn new(k_lo: usize, k_hi: usize, p: usize) -> Result<Self> {
        if k_lo < 2 || k_lo > k_hi || k_hi > p {
            return Err(domain(
                "HillWindow::new",
                format!("need 2 <= k_lo <= k_hi <= p, got ({k_lo}, {k_hi}) with p = {p}"),
            ));
        }
        Ok(HillWindow { k_lo, k_hi })
    }

    /// `(max(2, ⌊p/10⌋), ⌊9p/10⌋)`, widened to `k_hi >= k_lo` for small `p`.
    pub fn default_for(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(domain("HillWindow::default_for", format!("need p >= 2, got {p}")));
        }
        let k_lo = (p / 10).max(2);
        let k_hi = (9 * p / 10).max(k_lo);
        Self::new(k_lo, k_hi, p)
    }
}

/// Reusable buffers so the per-iteration estimate does not allocate.
#[derive(Debug, Default, Clone)]
pub struct HillScratch {
    logs: Vec<f64>,
}

/// Hill estimates `ξ̂_k` for `k = 2..=p`; element `i` holds `k = i + 2`.
pub fn hill_estimates(lambdas: &[f64]) -> Result<Vec<f64>> {
    let mut scratch = HillScratch::default();
    fill_sorted_logs(lambdas, &mut scratch)?;
    let logs = &scratch.logs;
    let mut out = Vec::with_capacity(logs.len() - 1);
    let mut prefix = logs[0];
    for k in 2..=logs.len() {
        let est = prefix / (k - 1) as f64 - logs[k - 1];
        out.push(est.max(0.0));
        prefix += logs[k - 1];
    }
    Ok(out)
}

fn fill_sorted_logs(lambdas: &[f64], scratch: &mut HillScratch) -> Result<()> {
    if lambdas.len() < 2 {
        return Err(domain(
            "hill_estimates",
            format!("need at least 2 values, got {}", lambdas.len()),
        ));
    }
    if let Some(bad) = lambdas.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(domain(
            "hill_estimates",
            format!("non-positive or non-finite value {bad}"),
        ));
    }
    scratch.logs.clear();
    scratch.logs.extend(lambdas.iter().map(|v| v.ln()));
    // descending; stable so ties keep input order
    scratch.logs.sort_by(|a, b| b.total_cmp(a));
    Ok(())
}

/// `ln` of the window-averaged Hill estimate, floored at `ln 1e-8`.
pub fn calibrated_mu(lambdas: &[f64], window: HillWindow) -> Result<f64> {
    calibrated_mu_with(lambdas, window, &mut HillScratch::default())
}

pub fn calibrated_mu_with(lambdas: &[f64], window: HillWindow, scratch: &mut HillScratch) -> Result<f64> {
    if window.k_hi > lambdas.len() {
        return Err(domain(
            "calibrated_mu",
            format!("window upper end {} exceeds p = {}", window.k_hi, lambdas.len()),
        ));
    }
    fill_sorted_logs(lambdas, scratch)?;
    let logs = &scratch.logs;
    let mut prefix: f64 = logs[..window.k_lo - 1].iter().sum();
    let mut total = 0.0;
    for k in window.k_lo..=window.k_hi {
        total += (prefix / (k - 1) as f64 - logs[k - 1]).max(0.0);
        prefix += logs[k - 1];
    }
    let mean = total / (window.k_hi - window.k_lo + 1) as f64;
    Ok(mean.max(HILL_FLOOR).ln())
}
