//! Gibbs sampler for the GLT prior:
//!
//! ```text
//! y | β, σ²      ~ N(Xβ, σ²I)            π(σ²) ∝ 1/σ²
//! β_j | λ_j, σ²  ~ N(0, λ_j² σ²)
//! λ_j | τ, ξ     ~ GPD(τ, ξ)
//! τ | ξ          ~ IG(p/ξ + 1, 1)
//! ξ              ~ logN(μ, ρ²) on (1/2, ∞)
//! ```
//!
//! λ and τ are updated by parameter-expanded slice steps whose auxiliary
//! bounds are computed with `expm1` so they stay exact when the slice is
//! extremely thin; ξ is updated on `η = ln ξ` by the elliptical slice sampler
//! centered at the Hill estimate of the current λ.

use nalgebra::DVector;
use rand::Rng;

use crate::distributions::{
    invgamma_sample, invgamma_sample_truncated, mvn_sample_posterior, uniform_open, ChainRng, PosteriorDesign,
};
use crate::error::{Error, Result};
use crate::ess::{ess_step, EllipseSpec, EssStep};
use crate::hill::{calibrated_mu_with, HillScratch, HillWindow};
use crate::model::{check_abort, ChainConfig, ChainOutput, Diagnostics, RegressionData, SigmaPrior, XiCenter};
use crate::specfun::ln_gamma;

/// Floor for `β_j² / (2σ²)` and for the σ² rate.
pub const RATE_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct GltState {
    pub beta: DVector<f64>,
    pub sigma2: f64,
    pub lambda: DVector<f64>,
    pub tau: f64,
    pub xi: f64,
}

impl GltState {
    /// `β = 0, σ² = var(y), λ = 1, τ = 1, ξ = 1`.
    pub fn initial(data: &RegressionData) -> Self {
        let p = data.p();
        let v = data.response_var();
        GltState {
            beta: DVector::zeros(p),
            sigma2: if v > 0.0 && v.is_finite() { v } else { 1.0 },
            lambda: DVector::from_element(p, 1.0),
            tau: 1.0,
            xi: 1.0,
        }
    }

    pub fn check(&self, xi_floor: f64) -> Result<()> {
        let ok = self.sigma2 > 0.0
            && self.sigma2.is_finite()
            && self.tau > 0.0
            && self.tau.is_finite()
            && self.xi > xi_floor
            && self.xi.is_finite()
            && self.lambda.iter().all(|l| *l > 0.0 && l.is_finite())
            && self.beta.iter().all(|b| b.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "sigma2 {}, tau {}, xi {}, min lambda {}",
                self.sigma2,
                self.tau,
                self.xi,
                self.lambda.min()
            )))
        }
    }
}

/// `g(γ) = (ξ + τ γ^{-1/2})^{-(1/ξ+1)}`.
pub fn g_lambda(gamma: f64, tau: f64, xi: f64) -> f64 {
    (xi + tau / gamma.sqrt()).powf(-(1.0 / xi + 1.0))
}

/// `g⁻¹(u) = [τ / (u^{-ξ/(1+ξ)} - ξ)]²`.
pub fn g_lambda_inv(u: f64, tau: f64, xi: f64) -> f64 {
    let t = tau / (u.powf(-xi / (1.0 + xi)) - xi);
    t * t
}

/// `g_j(τ) = (τ + ξ λ_j)^{-(1/ξ+1)}`.
pub fn g_tau(tau: f64, xi: f64, lambda: f64) -> f64 {
    (tau + xi * lambda).powf(-(1.0 / xi + 1.0))
}

/// `g_j⁻¹(v) = v^{-ξ/(1+ξ)} - ξ λ_j`.
pub fn g_tau_inv(v: f64, xi: f64, lambda: f64) -> f64 {
    v.powf(-xi / (1.0 + xi)) - xi * lambda
}

/// Lower slice bound on `γ = λ²` for `u = U · g(λ²)`, evaluated without
/// forming `u` so `U → 1` keeps full relative precision.
pub fn lambda_slice_bound(lambda: f64, tau: f64, xi: f64, unif: f64) -> f64 {
    let e = (-(xi / (1.0 + xi)) * unif.ln()).exp_m1();
    let t = tau * lambda / (tau + (xi * lambda + tau) * e);
    t * t
}

/// Upper slice bound on τ from `v_j = U_j · g_j(τ)`.
pub fn tau_slice_bound(tau: f64, xi: f64, lambda: f64, unif: f64) -> f64 {
    let e = (-(xi / (1.0 + xi)) * unif.ln()).exp_m1();
    tau + (tau + xi * lambda) * e
}

/// `ln L(η)` of the ξ conditional on `η = ln ξ`, up to the prior.
pub fn xi_log_lik(eta: f64, tau: f64, lambda: &[f64], xi_floor: f64) -> f64 {
    if !(eta > xi_floor.ln()) || !eta.is_finite() {
        return f64::NEG_INFINITY;
    }
    let xi = eta.exp();
    let p = lambda.len() as f64;
    let s: f64 = lambda.iter().map(|l| (tau + xi * l).ln()).sum();
    -ln_gamma(p / xi + 1.0) + 0.5 * p * std::f64::consts::PI.ln() - (1.0 / xi + 1.0) * s
}

/// Step 1: `β ~ N(ΣX'y, σ²Σ)`, `Σ = (X'X + diag(λ²)⁻¹)⁻¹`.
pub fn step_beta<R: Rng + ?Sized>(
    state: &mut GltState,
    design: &PosteriorDesign,
    d_buf: &mut Vec<f64>,
    rng: &mut R,
) -> Result<()> {
    d_buf.clear();
    d_buf.extend(state.lambda.iter().map(|l| l * l));
    state.beta = mvn_sample_posterior(design, d_buf, state.sigma2, rng)?;
    Ok(())
}

/// Step 2. Returns `true` when the rate had to be floored.
pub fn step_sigma2<R: Rng + ?Sized>(
    state: &mut GltState,
    data: &RegressionData,
    prior: SigmaPrior,
    rng: &mut R,
) -> Result<bool> {
    let (a0, b0) = prior.shape_rate();
    let pen: f64 = state
        .beta
        .iter()
        .zip(state.lambda.iter())
        .map(|(b, l)| (b / l) * (b / l))
        .sum();
    let shape = 0.5 * (data.n() + data.p()) as f64 + a0;
    let rate = 0.5 * (data.rss(&state.beta) + pen) + b0;
    let degenerate = !(rate >= RATE_FLOOR);
    state.sigma2 = invgamma_sample(shape, if degenerate { RATE_FLOOR } else { rate }, rng)?;
    Ok(degenerate)
}

/// Step 3 for coefficient `j`: one slice cycle on `γ = λ_j²`.
pub fn step_lambda<R: Rng + ?Sized>(state: &mut GltState, j: usize, rng: &mut R) -> Result<()> {
    let (tau, xi) = (state.tau, state.xi);
    let lam = state.lambda[j];
    let m = (state.beta[j] * state.beta[j] / (2.0 * state.sigma2)).max(RATE_FLOOR);
    let lo = lambda_slice_bound(lam, tau, xi, uniform_open(rng));
    let shape = 0.5 * (1.0 / xi + 1.0);
    let gamma = invgamma_sample_truncated(shape, m, lo, f64::INFINITY, rng)?;
    state.lambda[j] = gamma.sqrt();
    Ok(())
}

/// Step 4: one slice cycle on τ with target `IG(τ|1,1) ∏ g_j(τ)`.
pub fn step_tau<R: Rng + ?Sized>(state: &mut GltState, rng: &mut R) -> Result<()> {
    let (tau, xi) = (state.tau, state.xi);
    let mut hi = f64::INFINITY;
    for &l in state.lambda.iter() {
        hi = hi.min(tau_slice_bound(tau, xi, l, uniform_open(rng)));
    }
    state.tau = invgamma_sample_truncated(1.0, 1.0, 0.0, hi, rng)?;
    Ok(())
}

/// Step 5: elliptical slice step on `η = ln ξ`.
pub fn step_xi<R: Rng + ?Sized>(
    state: &mut GltState,
    config: &ChainConfig,
    scratch: &mut HillScratch,
    rng: &mut R,
) -> Result<EssStep> {
    if !(state.xi > config.xi_floor) {
        return Err(Error::InvalidState(format!(
            "xi = {} not above the floor {}",
            state.xi, config.xi_floor
        )));
    }
    let center = xi_center(state.lambda.as_slice(), config.xi_center, scratch)?;
    let spec = EllipseSpec::new(center, config.rho2)?;
    let tau = state.tau;
    let lambda = state.lambda.as_slice();
    let floor = config.xi_floor;
    let step = ess_step(state.xi.ln(), spec, |eta| xi_log_lik(eta, tau, lambda, floor), rng)?;
    state.xi = step.eta.exp();
    Ok(step)
}

/// `μ̂`: Hill calibration with the default window, or the fixed value.
/// With a single coefficient there are no order statistics to average and
/// the center is `ln 1`.
pub fn xi_center(lambda: &[f64], center: XiCenter, scratch: &mut HillScratch) -> Result<f64> {
    match center {
        XiCenter::Fixed(mu) => Ok(mu),
        XiCenter::Hill if lambda.len() < 2 => Ok(0.0),
        XiCenter::Hill => calibrated_mu_with(lambda, HillWindow::default_for(lambda.len())?, scratch),
    }
}

/// Full-chain driver with a sweep-level API, so callers (the Geweke test)
/// can interleave their own updates.
pub struct GltSampler {
    data: RegressionData,
    design: PosteriorDesign,
    config: ChainConfig,
    state: GltState,
    rng: ChainRng,
    diagnostics: Diagnostics,
    scratch: HillScratch,
    d_buf: Vec<f64>,
    planned: usize,
}

impl GltSampler {
    pub fn new(data: RegressionData, config: ChainConfig) -> Result<Self> {
        config.validate()?;
        let state = GltState::initial(&data);
        let rng = ChainRng::new(config.seed, config.stream);
        let design = data.posterior_design();
        let planned = config.burn + config.keep;
        Ok(GltSampler {
            data,
            design,
            config,
            state,
            rng,
            diagnostics: Diagnostics::default(),
            scratch: HillScratch::default(),
            d_buf: Vec::new(),
            planned,
        })
    }

    pub fn state(&self) -> &GltState {
        &self.state
    }

    pub fn set_state(&mut self, state: GltState) -> Result<()> {
        if state.beta.len() != self.data.p() || state.lambda.len() != self.data.p() {
            return Err(Error::Dimension("state does not match the design".into()));
        }
        state.check(self.config.xi_floor)?;
        self.state = state;
        Ok(())
    }

    pub fn data(&self) -> &RegressionData {
        &self.data
    }

    pub fn rng_mut(&mut self) -> &mut ChainRng {
        &mut self.rng
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    pub fn set_response(&mut self, y: &DVector<f64>) -> Result<()> {
        self.data.set_response(y)?;
        self.design.set_response(y);
        Ok(())
    }

    /// One pass of Steps 1 to 5.
    pub fn sweep(&mut self) -> Result<()> {
        let st = &mut self.state;
        let rng = &mut self.rng;
        let diag = &mut self.diagnostics;
        diag.iterations += 1;

        match step_beta(st, &self.design, &mut self.d_buf, rng) {
            Ok(()) => {}
            Err(Error::Factorization) => {
                diag.factorization_failures += 1;
                check_abort(diag.factorization_failures, self.planned)?;
            }
            Err(e) => return Err(e),
        }
        if step_sigma2(st, &self.data, self.config.sigma_prior, rng)? {
            diag.degenerate_sigma_rate += 1;
        }
        for j in 0..st.lambda.len() {
            match step_lambda(st, j, rng) {
                Ok(()) => {}
                Err(Error::DegenerateMass { .. }) => diag.lambda_degenerate += 1,
                Err(e) => return Err(e),
            }
        }
        match step_tau(st, rng) {
            Ok(()) => {}
            Err(Error::DegenerateMass { .. }) => diag.tau_degenerate += 1,
            Err(e) => return Err(e),
        }
        let ess = step_xi(st, &self.config, &mut self.scratch, rng)?;
        diag.ess_calls += 1;
        diag.ess_proposals += ess.proposals as u64;
        diag.ess_max_proposals = diag.ess_max_proposals.max(ess.proposals);
        if ess.capped {
            diag.ess_capped += 1;
        }
        debug_assert!(
            st.check(self.config.xi_floor).is_ok(),
            "{:?}",
            st.check(self.config.xi_floor)
        );
        Ok(())
    }

    /// Burn-in, then store every `thin`-th of `keep` iterations.
    pub fn run(mut self) -> Result<ChainOutput> {
        for _ in 0..self.config.burn {
            self.sweep()?;
        }
        let draws = self.config.kept_draws();
        let p = self.data.p();
        let mut out = ChainOutput::with_capacity(draws, p, true, self.data.response_var().sqrt());
        for it in 1..=draws * self.config.thin {
            self.sweep()?;
            if it % self.config.thin == 0 {
                let row = it / self.config.thin - 1;
                let st = &self.state;
                out.beta.row_mut(row).tr_copy_from(&st.beta);
                out.lambda.row_mut(row).tr_copy_from(&st.lambda);
                out.sigma2.push(st.sigma2);
                out.tau.push(st.tau);
                if let Some(xi) = out.xi.as_mut() {
                    xi.push(st.xi);
                }
                out.log_lik.push(self.data.log_lik(&st.beta, st.sigma2));
            }
        }
        out.diagnostics = self.diagnostics;
        Ok(out)
    }
}

/// Run one GLT chain.
pub fn run_chain(data: &RegressionData, config: &ChainConfig) -> Result<ChainOutput> {
    GltSampler::new(data.clone(), config.clone())?.run()
}
