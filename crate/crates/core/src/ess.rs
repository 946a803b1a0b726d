//! Scalar elliptical slice sampler with a Gaussian prior `N(center, variance)`.

use std::f64::consts::PI;

use rand::Rng;

use crate::distributions::{std_normal, uniform_open};
use crate::error::{domain, Error, Result};

pub const ESS_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseSpec {
    pub center: f64,
    pub variance: f64,
}

impl EllipseSpec {
    pub fn new(center: f64, variance: f64) -> Result<Self> {
        if !center.is_finite() || !(variance > 0.0 && variance.is_finite()) {
            return Err(domain(
                "EllipseSpec::new",
                format!("center {center}, variance {variance}"),
            ));
        }
        Ok(EllipseSpec { center, variance })
    }
}

/// Outcome of one slice step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssStep {
    pub eta: f64,
    /// Number of angle proposals evaluated (1 = first proposal accepted).
    pub proposals: usize,
    /// The iteration cap was hit and the current state was returned.
    pub capped: bool,
}

/// One elliptical slice update of `eta_current` targeting
/// `exp(log_lik(η)) · N(η | center, variance)`.
pub fn ess_step<F, R>(eta_current: f64, spec: EllipseSpec, log_lik: F, rng: &mut R) -> Result<EssStep>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    let ll_current = log_lik(eta_current);
    if ll_current == f64::NEG_INFINITY || ll_current.is_nan() {
        return Err(Error::InvalidState(format!(
            "log-likelihood at the current state eta = {eta_current} is {ll_current}"
        )));
    }
    let mu = spec.center;
    let nu = mu + spec.variance.sqrt() * std_normal(rng);
    let log_u = uniform_open(rng).ln();
    let threshold = ll_current + log_u;

    // θ ~ U(-π, π]
    let mut theta = PI - 2.0 * PI * rng.random::<f64>();
    let mut theta_min = -PI;
    let mut theta_max = PI;
    let x0 = eta_current - mu;
    let v0 = nu - mu;
    for it in 1..=ESS_MAX_ITER {
        let eta = x0 * theta.cos() + v0 * theta.sin() + mu;
        if log_lik(eta) > threshold {
            return Ok(EssStep {
                eta,
                proposals: it,
                capped: false,
            });
        }
        if theta > 0.0 {
            theta_max = theta;
        } else {
            theta_min = theta;
        }
        // U(θ_min, θ_max]
        theta = theta_max - (theta_max - theta_min) * rng.random::<f64>();
    }
    Ok(EssStep {
        eta: eta_current,
        proposals: ESS_MAX_ITER,
        capped: true,
    })
}
