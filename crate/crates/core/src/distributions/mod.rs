//! Densities and seeded samplers for every distribution in the two
//! hierarchies.

mod mvn;
mod truncated;

pub use mvn::{mvn_sample_posterior, DenseDesign, FastDesign, PosteriorDesign};
pub use truncated::{gamma_sample_truncated, invgamma_sample_truncated};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};

use crate::error::{domain, Result};
use crate::specfun::{ln_gamma, ln_gamma_pq};

/// Seeded stream generator: one ChaCha8 key per master seed, one stream per
/// replicate or chain. Equal `(seed, stream)` pairs replay bit-identically.
#[derive(Debug, Clone)]
pub struct ChainRng {
    inner: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl ChainRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        ChainRng { inner, seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for ChainRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

#[inline]
pub fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Generalized Pareto distribution with scale `tau` and shape `xi`, location 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gpd {
    tau: f64,
    xi: f64,
}

impl Gpd {
    pub fn new(tau: f64, xi: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) || !(xi > 0.0 && xi.is_finite()) {
            return Err(domain(
                "Gpd::new",
                format!("need tau > 0 and xi > 0, got ({tau}, {xi})"),
            ));
        }
        Ok(Gpd { tau, xi })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        -self.tau.ln() - (1.0 / self.xi + 1.0) * (self.xi * x / self.tau).ln_1p()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain("gpd_pdf", format!("x = {x} outside the support")));
        }
        Ok(self.ln_pdf(x).exp())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain("gpd_cdf", format!("x = {x} outside the support")));
        }
        Ok(-(-(self.xi * x / self.tau).ln_1p() / self.xi).exp_m1())
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain("gpd_quantile", format!("probability {u} outside (0, 1)")));
        }
        Ok(self.quantile_unchecked(u))
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        // (1-u)^{-xi} - 1, computed without cancellation
        self.tau / self.xi * (-self.xi * (-u).ln_1p()).exp_m1()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_unchecked(uniform_open(rng))
    }
}

/// Standard half-Cauchy density on (0, ∞).
pub fn half_cauchy_pdf(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        2.0 / (std::f64::consts::PI * (1.0 + x * x))
    }
}

pub fn half_cauchy_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        2.0 / std::f64::consts::PI * x.atan()
    }
}

pub fn half_cauchy_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (0.5 * std::f64::consts::PI * uniform_open(rng)).tan()
}

/// Log-normal density of `x` with log-scale mean `mu` and variance `s2`.
pub fn lognormal_ln_pdf(x: f64, mu: f64, s2: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let z = x.ln() - mu;
    -x.ln() - 0.5 * (2.0 * std::f64::consts::PI * s2).ln() - 0.5 * z * z / s2
}

pub fn lognormal_sample<R: Rng + ?Sized>(mu: f64, s2: f64, rng: &mut R) -> f64 {
    (mu + s2.sqrt() * std_normal(rng)).exp()
}

fn check_ig(func: &'static str, a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(domain(func, format!("need shape > 0 and rate > 0, got ({a}, {b})")));
    }
    Ok(())
}

/// Draw from IG(a, b), density ∝ x^{-a-1} e^{-b/x}.
pub fn invgamma_sample<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    check_ig("invgamma_sample", a, b)?;
    let g = Gamma::new(a, 1.0).map_err(|e| domain("invgamma_sample", e.to_string()))?;
    Ok(b / g.sample(rng))
}

pub fn invgamma_ln_pdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    a * b.ln() - ln_gamma(a) - (a + 1.0) * x.ln() - b / x
}

/// IG(a, b) CDF, `Q(a, b/x)`.
pub fn invgamma_cdf(x: f64, a: f64, b: f64) -> Result<f64> {
    check_ig("invgamma_cdf", a, b)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(ln_gamma_pq(a, b / x)?.1.exp())
}
