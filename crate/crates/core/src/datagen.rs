//! Synthetic regression data, the normal-means quantile transform and the
//! Gaussian-kernel design.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::std_normal;
use crate::error::{domain, Error, Result};
use crate::model::{sample_var, RegressionData};
use crate::specfun::{normal_quantile, student_t_cdf};

/// Largest |z| the quantile transform emits.
pub const Z_CLAMP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEnv {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub rho: f64,
    pub snr: f64,
}

impl SimEnv {
    pub fn new(n: usize, p: usize, q: usize, rho: f64, snr: f64) -> Result<Self> {
        let env = SimEnv { n, p, q, rho, snr };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.p < 1 || self.q > self.p {
            return Err(domain(
                "SimEnv",
                format!(
                    "need n >= 3, p >= 1, q <= p; got n {} p {} q {}",
                    self.n, self.p, self.q
                ),
            ));
        }
        if !(self.rho >= 0.0 && self.rho < 1.0) {
            return Err(domain("SimEnv", format!("rho = {} outside [0, 1)", self.rho)));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(domain("SimEnv", format!("snr = {} must be positive", self.snr)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimData {
    pub data: RegressionData,
    pub truth: DVector<f64>,
    pub sigma0: f64,
}

/// Rows of the raw design drawn from `N_p(0, ρJ + (1-ρ)I)` via one shared
/// factor per row.
pub fn raw_design<R: Rng + ?Sized>(n: usize, p: usize, rho: f64, rng: &mut R) -> DMatrix<f64> {
    let a = rho.sqrt();
    let b = (1.0 - rho).sqrt();
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let shared = std_normal(rng);
        for j in 0..p {
            x[(i, j)] = a * shared + b * std_normal(rng);
        }
    }
    x
}

/// Center each column, then scale it to unit Euclidean norm.
pub fn normalize_columns(x: &mut DMatrix<f64>) -> Result<()> {
    let n = x.nrows() as f64;
    for (j, mut col) in x.column_iter_mut().enumerate() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateColumn(j));
        }
        col /= norm;
    }
    Ok(())
}

/// `y = Xβ₀ + σ₀ε` with `β₀ = (1_q, 0)` and `σ₀² = var(Xβ₀) / (SNR · var(ε))`.
///
/// A degenerate column (probability zero for continuous draws) triggers a
/// redraw of the design.
pub fn simulate<R: Rng + ?Sized>(env: &SimEnv, rng: &mut R) -> Result<SimData> {
    env.validate()?;
    let SimEnv { n, p, q, rho, snr } = *env;
    let x = loop {
        let mut x = raw_design(n, p, rho, rng);
        match normalize_columns(&mut x) {
            Ok(()) => break x,
            Err(Error::DegenerateColumn(_)) => continue,
            Err(e) => return Err(e),
        }
    };
    let truth = DVector::from_fn(p, |j, _| if j < q { 1.0 } else { 0.0 });
    let eps = DVector::from_fn(n, |_, _| std_normal(rng));
    let signal = &x * &truth;
    let var_signal = sample_var(signal.as_slice()).unwrap_or(0.0);
    let var_eps = sample_var(eps.as_slice()).unwrap_or(1.0);
    // q = 0 has no signal variance; fall back to unit noise
    let sigma0 = if var_signal > 0.0 {
        (var_signal / (snr * var_eps)).sqrt()
    } else {
        1.0
    };
    let y = signal + eps * sigma0;
    Ok(SimData {
        data: RegressionData::new(x, y)?,
        truth,
        sigma0,
    })
}

/// `z_j = Φ⁻¹(F_df(t_j))`, evaluated on the tail that keeps precision and
/// clamped to `|z| <= 40`.
pub fn quantile_transform(t: &[f64], df: f64) -> Result<Vec<f64>> {
    t.iter()
        .map(|&tj| {
            if !tj.is_finite() {
                return Err(domain("quantile_transform", format!("non-finite statistic {tj}")));
            }
            if tj == 0.0 {
                return Ok(0.0);
            }
            // fold onto the lower tail: z(-t) = -z(t)
            let lower = student_t_cdf(-tj.abs(), df)?;
            let z = if lower > 0.0 {
                normal_quantile(lower)?.max(-Z_CLAMP)
            } else {
                -Z_CLAMP
            };
            Ok(if tj > 0.0 { -z } else { z })
        })
        .collect()
}

/// `K_ij = exp(-(x_i - x_j)² / (2 h²))`.
pub fn gaussian_kernel_design(x: &[f64], bandwidth: f64) -> Result<DMatrix<f64>> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(domain(
            "gaussian_kernel_design",
            format!("bandwidth {bandwidth} must be positive"),
        ));
    }
    let n = x.len();
    let mut k = DMatrix::from_element(n, n, 1.0);
    let c = 0.5 / (bandwidth * bandwidth);
    for i in 0..n {
        for j in 0..i {
            let d = x[i] - x[j];
            let v = (-c * d * d).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Subtract the mean, standing in for an intercept.
pub fn center(y: &[f64]) -> Vec<f64> {
    let m = y.iter().sum::<f64>() / y.len().max(1) as f64;
    y.iter().map(|v| v - m).collect()
}
