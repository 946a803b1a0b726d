//! Test oracles kept independent of the library's numerical routes:
//! tanh-sinh quadrature, tabulated CDFs, KS statistics, batch-means standard
//! errors and the two-simulator joint-distribution harness.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use glt_core::distributions::{invgamma_sample, std_normal, ChainRng, Gpd};
use glt_core::hill::HillWindow;
use glt_core::model::XiCenter;
use glt_core::{ChainConfig, GltSampler, GltState, HsSampler, HsState, RegressionData, SigmaPrior};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Tanh-sinh quadrature of `f` over `[a, b]`. `f` receives the abscissa and
/// its distances to both endpoints, so endpoint singularities can be
/// evaluated without cancellation.
pub fn tanh_sinh_with<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let node = |t: f64| -> (f64, f64) {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        // distance of the node from the nearer endpoint, relative to the half width
        let d = 2.0 / (1.0 + (2.0 * u.abs()).exp());
        (d, w)
    };
    let eval = |t: f64| -> f64 {
        let (d, w) = node(t);
        if d == 0.0 || w == 0.0 {
            return 0.0;
        }
        let (x, da, db) = if t >= 0.0 {
            let db = half * d;
            (b - db, b - a - db, db)
        } else {
            let da = half * d;
            (a + da, da, b - a - da)
        };
        let v = f(x, da, db) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut est = sum * h * half;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let next = sum * h * half;
        if (next - est).abs() <= rel_tol * next.abs() {
            return next;
        }
        est = next;
    }
    est
}

pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    tanh_sinh_with(|x, _, _| f(x), a, b, 1e-14)
}

/// `∫ f` over consecutive breakpoints.
pub fn tanh_sinh_pieces<F: Fn(f64) -> f64>(f: F, cuts: &[f64]) -> f64 {
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| tanh_sinh(&f, w[0], w[1]))
        .sum()
}

/// `E_s(x) = ∫₁^∞ e^{-xt} t^{-s} dt`, integrated over `u = ln t`.
pub fn exp_integral_oracle(s: f64, x: f64) -> f64 {
    let f = |u: f64| (-x * u.exp() + (1.0 - s) * u).exp();
    let knee = (1.0 / x).ln().max(0.0);
    tanh_sinh_pieces(f, &[0.0, knee, knee + 3.0, knee + 7.0])
}

/// `γ(s, x) = ∫₀^x t^{s-1} e^{-t} dt`.
pub fn lower_gamma_oracle(s: f64, x: f64) -> f64 {
    // the distance from 0 is the abscissa itself, kept exact near the origin
    let f = |_: f64, t: f64, _: f64| (-t).exp() * t.powf(s - 1.0);
    let split = x.min(s.max(1.0));
    let mut v = tanh_sinh_with(f, 0.0, split, 1e-14);
    if x > split {
        v += tanh_sinh(|t| (-t).exp() * t.powf(s - 1.0), split, x);
    }
    v
}

/// `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt` over `u = t - x`.
pub fn upper_gamma_oracle(s: f64, x: f64) -> f64 {
    let f = |v: f64| (-(x + v)).exp() * (x + v).powf(s - 1.0);
    let c = s.max(1.0);
    tanh_sinh_pieces(f, &[0.0, c, 4.0 * c, 20.0 * c, 60.0 * c + 800.0])
}

/// Monotone CDF of an unnormalized density tabulated on a fine grid of
/// `t = ln x` (Simpson cells) and interpolated linearly.
pub struct TabulatedCdf {
    t: Vec<f64>,
    cum: Vec<f64>,
}

impl TabulatedCdf {
    /// `log_density` is `ln f(x)` for the density in `x`; the grid spans
    /// `x ∈ [e^{t_lo}, e^{t_hi}]`.
    pub fn log_scale<F: Fn(f64) -> f64>(log_density: F, t_lo: f64, t_hi: f64, cells: usize) -> Self {
        let g = |t: f64| (log_density(t.exp()) + t).exp();
        Self::build(g, t_lo, t_hi, cells)
    }

    /// Density tabulated directly in `x`.
    pub fn linear<F: Fn(f64) -> f64>(density: F, lo: f64, hi: f64, cells: usize) -> Self {
        Self::build(density, lo, hi, cells)
    }

    fn build<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, cells: usize) -> Self {
        let h = (hi - lo) / cells as f64;
        let mut t = Vec::with_capacity(cells + 1);
        let mut cum = Vec::with_capacity(cells + 1);
        t.push(lo);
        cum.push(0.0);
        let mut acc = 0.0;
        let mut left = g(lo);
        for i in 0..cells {
            let a = lo + i as f64 * h;
            let m = g(a + 0.5 * h);
            let right = g(a + h);
            acc += h / 6.0 * (left + 4.0 * m + right);
            t.push(a + h);
            cum.push(acc);
            left = right;
        }
        let total = acc;
        for c in cum.iter_mut() {
            *c /= total;
        }
        TabulatedCdf { t, cum }
    }

    fn at_t(&self, t: f64) -> f64 {
        if t <= self.t[0] {
            return 0.0;
        }
        if t >= *self.t.last().unwrap() {
            return 1.0;
        }
        let h = self.t[1] - self.t[0];
        let i = (((t - self.t[0]) / h) as usize).min(self.t.len() - 2);
        let w = (t - self.t[i]) / h;
        self.cum[i] + w * (self.cum[i + 1] - self.cum[i])
    }

    pub fn cdf_log(&self, x: f64) -> f64 {
        self.at_t(x.ln())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.at_t(x)
    }
}

/// One-sample Kolmogorov-Smirnov distance.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lam = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lam < 0.2 {
        return (d, 1.0);
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (if k % 2 == 1 { 1.0 } else { -1.0 }) * (-2.0 * kf * kf * lam * lam).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Standard error of the mean for independent draws.
pub fn iid_se(v: &[f64]) -> f64 {
    (variance(v) / v.len() as f64).sqrt()
}

/// Standard error of the mean of an autocorrelated series by non-overlapping
/// batch means.
pub fn batch_se(v: &[f64], batches: usize) -> f64 {
    let b = v.len() / batches;
    let means: Vec<f64> = (0..batches).map(|i| mean(&v[i * b..(i + 1) * b])).collect();
    (variance(&means) / batches as f64).sqrt()
}

/// Bisection root of a monotone increasing function.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of comparing one test function across the two simulators.
#[derive(Debug, Clone)]
pub struct GewekeMoment {
    pub name: String,
    pub marginal: f64,
    pub successive: f64,
    pub z: f64,
}

pub const GEWEKE_SIGMA: SigmaPrior = SigmaPrior::InvGamma { shape: 6.0, rate: 5.0 };
pub const GEWEKE_XI_MU: f64 = -0.223_143_551_314_209_76; // ln 0.8
pub const GEWEKE_RHO2: f64 = 0.05;

pub fn geweke_design(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChainRng::new(seed, 99);
    DMatrix::from_fn(n, p, |_, _| std_normal(&mut rng))
}

fn draw_response<R: Rng + ?Sized>(x: &DMatrix<f64>, beta: &DVector<f64>, sigma2: f64, rng: &mut R) -> DVector<f64> {
    let mut y = x * beta;
    let s = sigma2.sqrt();
    for v in y.iter_mut() {
        *v += s * std_normal(rng);
    }
    y
}

fn glt_prior_draw<R: Rng + ?Sized>(p: usize, rng: &mut R) -> GltState {
    let xi = loop {
        let v = (GEWEKE_XI_MU + GEWEKE_RHO2.sqrt() * std_normal(rng)).exp();
        if v > 0.5 {
            break v;
        }
    };
    let tau = invgamma_sample(p as f64 / xi + 1.0, 1.0, rng).unwrap();
    let gpd = Gpd::new(tau, xi).unwrap();
    let lambda = DVector::from_fn(p, |_, _| gpd.sample(rng));
    let sigma2 = invgamma_sample(6.0, 5.0, rng).unwrap();
    let s = sigma2.sqrt();
    let beta = DVector::from_fn(p, |j, _| lambda[j] * s * std_normal(rng));
    GltState {
        beta,
        sigma2,
        lambda,
        tau,
        xi,
    }
}

fn glt_functions(st: &GltState) -> [f64; 4] {
    [st.beta[0].atan(), st.sigma2.ln(), st.tau.ln(), st.xi.ln()]
}

const GLT_NAMES: [&str; 4] = ["atan beta1", "ln sigma2", "ln tau", "ln xi"];

fn compare(names: &[&str], mc: &[Vec<f64>], sc: &[Vec<f64>]) -> Vec<GewekeMoment> {
    let mut out = Vec::new();
    for (k, name) in names.iter().enumerate() {
        for power in [1, 2] {
            let a: Vec<f64> = mc[k].iter().map(|v| v.powi(power)).collect();
            let b: Vec<f64> = sc[k].iter().map(|v| v.powi(power)).collect();
            let (ma, mb) = (mean(&a), mean(&b));
            let se = (iid_se(&a).powi(2) + iid_se(&b).powi(2)).sqrt();
            out.push(GewekeMoment {
                name: format!("{name}^{power}"),
                marginal: ma,
                successive: mb,
                z: (ma - mb) / se,
            });
        }
    }
    out
}

/// Marginal-conditional vs successive-conditional simulation of the GLT
/// hierarchy with a proper σ² prior and a fixed ξ-prior center. Each of the
/// `draws` successive-conditional values comes from its own block: a fresh
/// prior draw of (θ, y) followed by `sweeps` rounds of θ | y then y | θ. A
/// correct kernel leaves the joint prior invariant at every round, and the
/// blocks are independent, so plain standard errors apply.
pub fn geweke_glt(n: usize, p: usize, draws: usize, sweeps: usize, seed: u64) -> Vec<GewekeMoment> {
    let x = geweke_design(n, p, seed);
    let mut rng = ChainRng::new(seed, 1);
    let mut mc = (0..4).map(|_| Vec::with_capacity(draws)).collect::<Vec<_>>();
    for _ in 0..draws {
        let st = glt_prior_draw(p, &mut rng);
        for (k, v) in glt_functions(&st).into_iter().enumerate() {
            mc[k].push(v);
        }
    }

    let config = ChainConfig {
        seed,
        stream: 2,
        rho2: GEWEKE_RHO2,
        sigma_prior: GEWEKE_SIGMA,
        xi_center: XiCenter::Fixed(GEWEKE_XI_MU),
        ..ChainConfig::default()
    };
    let y0 = DVector::zeros(n);
    let mut sampler = GltSampler::new(RegressionData::new(x.clone(), y0).unwrap(), config).unwrap();
    let mut sc = (0..4).map(|_| Vec::with_capacity(draws)).collect::<Vec<_>>();
    for _ in 0..draws {
        let init = glt_prior_draw(p, sampler.rng_mut());
        let y = draw_response(&x, &init.beta, init.sigma2, sampler.rng_mut());
        sampler.set_state(init).unwrap();
        sampler.set_response(&y).unwrap();
        for _ in 0..sweeps {
            sampler.sweep().unwrap();
            let (beta, sigma2) = (sampler.state().beta.clone(), sampler.state().sigma2);
            let y = draw_response(&x, &beta, sigma2, sampler.rng_mut());
            sampler.set_response(&y).unwrap();
        }
        for (k, v) in glt_functions(sampler.state()).into_iter().enumerate() {
            sc[k].push(v);
        }
    }
    compare(&GLT_NAMES, &mc, &sc)
}

fn hs_prior_draw<R: Rng + ?Sized>(p: usize, rng: &mut R) -> HsState {
    let nu = DVector::from_fn(p, |_, _| invgamma_sample(0.5, 1.0, rng).unwrap());
    let lambda = DVector::from_fn(p, |j, _| invgamma_sample(0.5, 1.0 / nu[j], rng).unwrap().sqrt());
    let zeta = invgamma_sample(0.5, 1.0, rng).unwrap();
    let tau = invgamma_sample(0.5, 1.0 / zeta, rng).unwrap().sqrt();
    let sigma2 = invgamma_sample(6.0, 5.0, rng).unwrap();
    let s = sigma2.sqrt();
    let beta = DVector::from_fn(p, |j, _| lambda[j] * tau * s * std_normal(rng));
    HsState {
        beta,
        sigma2,
        lambda,
        tau,
        nu,
        zeta,
    }
}

fn hs_functions(st: &HsState) -> [f64; 4] {
    [st.beta[0].atan(), st.sigma2.ln(), st.tau.ln(), st.lambda[0].ln()]
}

const HS_NAMES: [&str; 4] = ["atan beta1", "ln sigma2", "ln tau", "ln lambda1"];

/// Two-simulator check of the Horseshoe sampler, blocked as in [`geweke_glt`].
pub fn geweke_hs(n: usize, p: usize, draws: usize, sweeps: usize, seed: u64) -> Vec<GewekeMoment> {
    let x = geweke_design(n, p, seed);
    let mut rng = ChainRng::new(seed, 3);
    let mut mc = (0..4).map(|_| Vec::with_capacity(draws)).collect::<Vec<_>>();
    for _ in 0..draws {
        let st = hs_prior_draw(p, &mut rng);
        for (k, v) in hs_functions(&st).into_iter().enumerate() {
            mc[k].push(v);
        }
    }

    let config = ChainConfig {
        seed,
        stream: 4,
        sigma_prior: GEWEKE_SIGMA,
        ..ChainConfig::default()
    };
    let y0 = DVector::zeros(n);
    let mut sampler = HsSampler::new(RegressionData::new(x.clone(), y0).unwrap(), config, false).unwrap();
    let mut sc = (0..4).map(|_| Vec::with_capacity(draws)).collect::<Vec<_>>();
    for _ in 0..draws {
        let init = hs_prior_draw(p, sampler.rng_mut());
        let y = draw_response(&x, &init.beta, init.sigma2, sampler.rng_mut());
        sampler.set_state(init).unwrap();
        sampler.set_response(&y).unwrap();
        for _ in 0..sweeps {
            sampler.sweep().unwrap();
            let (beta, sigma2) = (sampler.state().beta.clone(), sampler.state().sigma2);
            let y = draw_response(&x, &beta, sigma2, sampler.rng_mut());
            sampler.set_response(&y).unwrap();
        }
        for (k, v) in hs_functions(sampler.state()).into_iter().enumerate() {
            sc[k].push(v);
        }
    }
    compare(&HS_NAMES, &mc, &sc)
}

// density and Hill oracles

/// `∫ N(β | 0, λ²) GPD(λ | τ, ξ) dλ` by tanh-sinh over `u = ln λ`.
pub fn glt_mixture_oracle(beta: f64, tau: f64, xi: f64) -> f64 {
    let b = beta.abs();
    let g = Gpd::new(tau, xi).unwrap();
    let f = |u: f64| {
        let lam = u.exp();
        let r = b / lam;
        (-0.5 * r * r - 0.5 * (2.0 * PI).ln() + g.ln_pdf(lam)).exp()
    };
    let (lb, lk) = (b.ln(), (tau / xi).ln());
    let top = lb.max(lk) + 80.0 / (1.0 + 1.0 / xi);
    let mut cuts = vec![lb - 6.0, lb, top];
    if lk > lb - 6.0 {
        cuts.push(lk);
    }
    cuts.sort_by(f64::total_cmp);
    tanh_sinh_pieces(f, &cuts)
}

/// `∫ N(β | 0, τ²λ²) C⁺(λ | 0, 1) dλ`.
pub fn hs_mixture_oracle(beta: f64, tau: f64) -> f64 {
    let b = beta.abs();
    let f = |u: f64| {
        let lam = u.exp();
        let s = tau * lam;
        let r = b / s;
        (-0.5 * r * r).exp() / (s * (2.0 * PI).sqrt()) * 2.0 / (PI * (1.0 + lam * lam)) * lam
    };
    let lb = (b / tau).ln();
    tanh_sinh_pieces(f, &[lb - 6.0, lb, lb.max(0.0) + 5.0, lb.max(0.0) + 45.0])
}

pub fn kappa_mass<F: Fn(f64) -> Option<f64>>(pdf: F, a: f64, b: f64) -> f64 {
    tanh_sinh_with(|k, _, _| pdf(k).unwrap_or(0.0), a, b, 1e-13)
}

/// GLT κ density written in `u = 1 - κ`, for the last stretch below 1 where
/// κ itself is not representable finely enough.
pub fn glt_kappa_in_u(u: f64, tau: f64, xi: f64) -> f64 {
    let k = 1.0 - u;
    0.5 * tau.powf(1.0 / xi) * k.powf(0.5 / xi - 1.0) / u.sqrt() / (tau * k.sqrt() + xi * u.sqrt()).powf(1.0 + 1.0 / xi)
}

pub fn hs_kappa_in_u(u: f64, tau: f64) -> f64 {
    let k = 1.0 - u;
    tau / PI / (k * u).sqrt() / (1.0 - (1.0 - tau * tau) * k)
}

pub const U_SPLIT: f64 = 1e-8;

pub fn total_kappa_mass<F: Fn(f64) -> Option<f64>, G: Fn(f64) -> f64>(pdf: F, in_u: G) -> f64 {
    let at = pdf(1.0 - U_SPLIT).unwrap();
    assert!((at / in_u(U_SPLIT) - 1.0).abs() < 1e-6);
    kappa_mass(&pdf, 0.0, 0.5)
        + kappa_mass(&pdf, 0.5, 1.0 - U_SPLIT)
        + tanh_sinh_with(|_, u, _| in_u(u), 0.0, U_SPLIT, 1e-13)
}

/// Large-p limit of the windowed estimate for GPD(τ, ξ) samples: the Hill
/// estimate at depth `t = k/p` tends to `(1/t) ∫_0^t ln(g(u)/g(t)) du` with
/// `g(u) = u^{-ξ} - 1` (τ cancels in the ratios).
pub fn windowed_limit(xi: f64, p: usize, w: HillWindow) -> f64 {
    let g = |u: f64| u.powf(-xi) - 1.0;
    let total: f64 = (w.k_lo..=w.k_hi)
        .map(|k| {
            let t = k as f64 / p as f64;
            let gt = g(t);
            tanh_sinh(|u| (g(u) / gt).ln(), 0.0, t) / t
        })
        .sum();
    total / (w.k_hi - w.k_lo + 1) as f64
}
