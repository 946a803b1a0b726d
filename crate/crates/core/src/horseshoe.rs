//! Horseshoe Gibbs sampler using the inverse-gamma mixture representation of
//! the half-Cauchy (Makalic & Schmidt, 2016):
//!
//! ```text
//! β_j | λ_j, τ, σ² ~ N(0, λ_j² τ² σ²)
//! λ_j² | ν_j ~ IG(1/2, 1/ν_j),   ν_j ~ IG(1/2, 1)
//! τ² | ζ     ~ IG(1/2, 1/ζ),     ζ   ~ IG(1/2, 1)
//! ```
//!
//! Every full conditional is inverse gamma. The truncated variant restricts
//! `τ > 1/p`.

use nalgebra::DVector;
use rand::Rng;

use crate::distributions::{
    invgamma_sample, invgamma_sample_truncated, mvn_sample_posterior, ChainRng, PosteriorDesign,
};
use crate::error::{Error, Result};
use crate::glt::RATE_FLOOR;
use crate::model::{check_abort, ChainConfig, ChainOutput, Diagnostics, RegressionData};

#[derive(Debug, Clone, PartialEq)]
pub struct HsState {
    pub beta: DVector<f64>,
    pub sigma2: f64,
    pub lambda: DVector<f64>,
    pub tau: f64,
    pub nu: DVector<f64>,
    pub zeta: f64,
}

impl HsState {
    pub fn initial(data: &RegressionData) -> Self {
        let p = data.p();
        let v = data.response_var();
        HsState {
            beta: DVector::zeros(p),
            sigma2: if v > 0.0 && v.is_finite() { v } else { 1.0 },
            lambda: DVector::from_element(p, 1.0),
            tau: 1.0,
            nu: DVector::from_element(p, 1.0),
            zeta: 1.0,
        }
    }

    fn valid(&self) -> bool {
        self.sigma2 > 0.0
            && self.tau > 0.0
            && self.zeta > 0.0
            && self.lambda.iter().all(|v| *v > 0.0 && v.is_finite())
            && self.nu.iter().all(|v| *v > 0.0 && v.is_finite())
    }
}

/// Squared scales are kept above this so their reciprocals stay finite once
/// the chain has collapsed.
const SCALE_FLOOR: f64 = 1e-300;

/// `λ_j² ~ IG(1, 1/ν_j + β_j²/(2τ²σ²))`.
pub fn step_lambda<R: Rng + ?Sized>(st: &mut HsState, j: usize, rng: &mut R) -> Result<()> {
    let b2 = st.beta[j] * st.beta[j];
    let rate = (1.0 / st.nu[j] + b2 / (2.0 * st.tau * st.tau * st.sigma2)).max(RATE_FLOOR);
    st.lambda[j] = invgamma_sample(1.0, rate, rng)?.max(SCALE_FLOOR).sqrt();
    Ok(())
}

/// `τ² ~ IG((p+1)/2, 1/ζ + Σβ_j²/(2λ_j²σ²))`, restricted to `(1/p², ∞)` when
/// `truncated`. Returns `true` when the draw was floored or its truncation
/// region had no representable mass (τ is then left unchanged).
pub fn step_tau<R: Rng + ?Sized>(st: &mut HsState, truncated: bool, rng: &mut R) -> Result<bool> {
    let p = st.beta.len() as f64;
    let ssq: f64 = st.beta.iter().zip(st.lambda.iter()).map(|(b, l)| b * b / (l * l)).sum();
    let shape = 0.5 * (p + 1.0);
    let rate = (1.0 / st.zeta + ssq / (2.0 * st.sigma2)).max(RATE_FLOOR);
    let tau2 = if truncated {
        match invgamma_sample_truncated(shape, rate, 1.0 / (p * p), f64::INFINITY, rng) {
            Ok(v) => v,
            Err(Error::DegenerateMass { .. }) => return Ok(true),
            Err(e) => return Err(e),
        }
    } else {
        invgamma_sample(shape, rate, rng)?
    };
    st.tau = tau2.max(SCALE_FLOOR).sqrt();
    Ok(tau2 < SCALE_FLOOR)
}

/// `ν_j ~ IG(1, 1 + 1/λ_j²)`.
pub fn step_nu<R: Rng + ?Sized>(st: &mut HsState, j: usize, rng: &mut R) -> Result<()> {
    let l2 = st.lambda[j] * st.lambda[j];
    st.nu[j] = invgamma_sample(1.0, 1.0 + 1.0 / l2, rng)?;
    Ok(())
}

/// `ζ ~ IG(1, 1 + 1/τ²)`.
pub fn step_zeta<R: Rng + ?Sized>(st: &mut HsState, rng: &mut R) -> Result<()> {
    st.zeta = invgamma_sample(1.0, 1.0 + 1.0 / (st.tau * st.tau), rng)?;
    Ok(())
}

pub struct HsSampler {
    data: RegressionData,
    design: PosteriorDesign,
    config: ChainConfig,
    truncated_tau: bool,
    state: HsState,
    rng: ChainRng,
    diagnostics: Diagnostics,
    d_buf: Vec<f64>,
    planned: usize,
}

impl HsSampler {
    pub fn new(data: RegressionData, config: ChainConfig, truncated_tau: bool) -> Result<Self> {
        config.validate()?;
        let mut state = HsState::initial(&data);
        if truncated_tau {
            state.tau = state.tau.max(2.0 / data.p() as f64);
        }
        let rng = ChainRng::new(config.seed, config.stream);
        let design = data.posterior_design();
        let planned = config.burn + config.keep;
        Ok(HsSampler {
            data,
            design,
            config,
            truncated_tau,
            state,
            rng,
            diagnostics: Diagnostics::default(),
            d_buf: Vec::new(),
            planned,
        })
    }

    pub fn state(&self) -> &HsState {
        &self.state
    }

    pub fn set_state(&mut self, state: HsState) -> Result<()> {
        if state.beta.len() != self.data.p() || !state.valid() {
            return Err(Error::InvalidState("horseshoe state rejected".into()));
        }
        self.state = state;
        Ok(())
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

    pub fn sweep(&mut self) -> Result<()> {
        let st = &mut self.state;
        let rng = &mut self.rng;
        let diag = &mut self.diagnostics;
        diag.iterations += 1;
        let p = self.data.p();
        let tau2 = st.tau * st.tau;

        self.d_buf.clear();
        self.d_buf.extend(st.lambda.iter().map(|l| l * l * tau2));
        match mvn_sample_posterior(&self.design, &self.d_buf, st.sigma2, rng) {
            Ok(b) => st.beta = b,
            Err(Error::Factorization) => {
                diag.factorization_failures += 1;
                check_abort(diag.factorization_failures, self.planned)?;
            }
            Err(e) => return Err(e),
        }

        let (a0, b0) = self.config.sigma_prior.shape_rate();
        let pen: f64 = st.beta.iter().zip(&self.d_buf).map(|(b, d)| b * b / d).sum();
        let rate = 0.5 * (self.data.rss(&st.beta) + pen) + b0;
        if !(rate >= RATE_FLOOR) {
            diag.degenerate_sigma_rate += 1;
        }
        st.sigma2 = invgamma_sample(0.5 * (self.data.n() + p) as f64 + a0, rate.max(RATE_FLOOR), rng)?;

        for j in 0..p {
            step_lambda(st, j, rng)?;
        }
        if step_tau(st, self.truncated_tau, rng)? {
            diag.tau_degenerate += 1;
        }
        for j in 0..p {
            step_nu(st, j, rng)?;
        }
        step_zeta(st, rng)?;
        debug_assert!(st.valid(), "{st:?}");
        Ok(())
    }

    pub fn run(mut self) -> Result<ChainOutput> {
        for _ in 0..self.config.burn {
            self.sweep()?;
        }
        let draws = self.config.kept_draws();
        let p = self.data.p();
        let mut out = ChainOutput::with_capacity(draws, p, false, self.data.response_var().sqrt());
        for it in 1..=draws * self.config.thin {
            self.sweep()?;
            if it % self.config.thin == 0 {
                let row = it / self.config.thin - 1;
                let st = &self.state;
                out.beta.row_mut(row).tr_copy_from(&st.beta);
                out.lambda.row_mut(row).tr_copy_from(&st.lambda);
                out.sigma2.push(st.sigma2);
                out.tau.push(st.tau);
                out.log_lik.push(self.data.log_lik(&st.beta, st.sigma2));
            }
        }
        out.diagnostics = self.diagnostics;
        Ok(out)
    }
}

/// Run one Horseshoe chain.
pub fn run_hs_chain(data: &RegressionData, config: &ChainConfig, truncated_tau: bool) -> Result<ChainOutput> {
    HsSampler::new(data.clone(), config.clone(), truncated_tau)?.run()
}
