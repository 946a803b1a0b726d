//! Draws from the Gaussian conditional of the coefficients,
//! `β ~ N(A⁻¹X'y, σ²A⁻¹)` with `A = X'X + D⁻¹` and `D` the diagonal prior
//! variances.
//!
//! Three strategies share that target: an O(p) identity-design path, a dense
//! Cholesky of the p×p precision, and for `p > 2n` the O(n²p) sampler of
//! Bhattacharya, Chakraborty & Mallick (2016) which only factors an n×n
//! system.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;

use super::std_normal;
use crate::error::{Error, Result};

/// Prior variances below this are treated as this value, keeping `1/d` finite.
const MIN_VARIANCE: f64 = f64::MIN_POSITIVE;

#[derive(Debug, Clone)]
pub struct DenseDesign {
    x: DMatrix<f64>,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct FastDesign {
    /// X transposed (p×n): each column is one observation, contiguous.
    xt: DMatrix<f64>,
    y: DVector<f64>,
}

/// Design-dependent precomputation for repeated β draws.
#[derive(Debug, Clone)]
pub enum PosteriorDesign {
    Identity(DVector<f64>),
    Dense(DenseDesign),
    Fast(FastDesign),
}

impl PosteriorDesign {
    /// Picks the dense path for `p <= 2n` and the structured path otherwise.
    pub fn new(x: &DMatrix<f64>, y: &DVector<f64>) -> Self {
        if x.ncols() <= 2 * x.nrows() {
            Self::dense(x, y)
        } else {
            Self::fast(x, y)
        }
    }

    pub fn identity(y: &DVector<f64>) -> Self {
        PosteriorDesign::Identity(y.clone())
    }

    pub fn dense(x: &DMatrix<f64>, y: &DVector<f64>) -> Self {
        PosteriorDesign::Dense(DenseDesign {
            x: x.clone(),
            xtx: x.tr_mul(x),
            xty: x.tr_mul(y),
        })
    }

    pub fn fast(x: &DMatrix<f64>, y: &DVector<f64>) -> Self {
        PosteriorDesign::Fast(FastDesign {
            xt: x.transpose(),
            y: y.clone(),
        })
    }

    pub fn ncoef(&self) -> usize {
        match self {
            PosteriorDesign::Identity(y) => y.len(),
            PosteriorDesign::Dense(d) => d.xtx.nrows(),
            PosteriorDesign::Fast(f) => f.xt.nrows(),
        }
    }

    /// Swap in a new response without refactoring the design.
    pub fn set_response(&mut self, y: &DVector<f64>) {
        match self {
            PosteriorDesign::Identity(v) => v.copy_from(y),
            PosteriorDesign::Dense(d) => d.xty = d.x.tr_mul(y),
            PosteriorDesign::Fast(f) => f.y.copy_from(y),
        }
    }
}

/// One draw from `N(A⁻¹X'y, σ²A⁻¹)`, `A = X'X + diag(1/d)`.
pub fn mvn_sample_posterior<R: Rng + ?Sized>(
    design: &PosteriorDesign,
    d: &[f64],
    sigma2: f64,
    rng: &mut R,
) -> Result<DVector<f64>> {
    if d.len() != design.ncoef() {
        return Err(Error::Dimension(format!(
            "{} prior variances for {} coefficients",
            d.len(),
            design.ncoef()
        )));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) || d.iter().any(|v| !(*v >= 0.0) || v.is_nan()) {
        return Err(Error::InvalidState(format!(
            "sigma2 = {sigma2} or a prior variance is invalid"
        )));
    }
    let sigma = sigma2.sqrt();
    match design {
        PosteriorDesign::Identity(y) => Ok(DVector::from_iterator(
            y.len(),
            y.iter().zip(d).map(|(&yj, &dj)| {
                let shrink = 1.0 / (1.0 + 1.0 / dj.max(MIN_VARIANCE));
                yj * shrink + sigma * shrink.sqrt() * std_normal(rng)
            }),
        )),
        PosteriorDesign::Dense(dd) => sample_dense(dd, d, sigma, rng),
        PosteriorDesign::Fast(fd) => sample_fast(fd, d, sigma, rng),
    }
}

fn sample_dense<R: Rng + ?Sized>(dd: &DenseDesign, d: &[f64], sigma: f64, rng: &mut R) -> Result<DVector<f64>> {
    let p = d.len();
    let mut a = dd.xtx.clone();
    for j in 0..p {
        a[(j, j)] += 1.0 / d[j].max(MIN_VARIANCE);
    }
    let chol = Cholesky::new(a).ok_or(Error::Factorization)?;
    let mut beta = chol.solve(&dd.xty);
    let z = DVector::from_fn(p, |_, _| std_normal(rng));
    // L⁻ᵀz has covariance A⁻¹
    let noise = chol
        .l_dirty()
        .tr_solve_lower_triangular(&z)
        .ok_or(Error::Factorization)?;
    beta.axpy(sigma, &noise, 1.0);
    if beta.iter().all(|v| v.is_finite()) {
        Ok(beta)
    } else {
        Err(Error::Factorization)
    }
}

fn sample_fast<R: Rng + ?Sized>(fd: &FastDesign, d: &[f64], sigma: f64, rng: &mut R) -> Result<DVector<f64>> {
    let (p, n) = fd.xt.shape();
    // u ~ N(0, σ²D), δ ~ N(0, I_n)
    let u = DVector::from_fn(p, |j, _| sigma * d[j].sqrt() * std_normal(rng));
    let delta = DVector::from_fn(n, |_, _| std_normal(rng));

    // M = X D X' + I, built from the scaled columns of X'
    let mut s = fd.xt.clone();
    for (j, &dj) in d.iter().enumerate() {
        let r = dj.sqrt();
        s.row_mut(j).scale_mut(r);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let ci = s.column(i);
        for k in 0..=i {
            let v = ci.dot(&s.column(k));
            m[(i, k)] = v;
            m[(k, i)] = v;
        }
        m[(i, i)] += 1.0;
    }

    // rhs = y/σ - (X u/σ + δ)
    let xu = fd.xt.tr_mul(&u);
    let mut rhs = &fd.y / sigma;
    rhs.axpy(-1.0 / sigma, &xu, 1.0);
    rhs -= &delta;

    let chol = Cholesky::new(m).ok_or(Error::Factorization)?;
    let w = chol.solve(&rhs);
    // θ = u + σ D X' w
    let xtw = &fd.xt * &w;
    let beta = DVector::from_fn(p, |j, _| u[j] + sigma * d[j] * xtw[j]);
    if beta.iter().all(|v| v.is_finite()) {
        Ok(beta)
    } else {
        Err(Error::Factorization)
    }
}
