//! Scalar special functions: incomplete gamma, the generalized exponential
//! integral `E_s(x)` of real order, and the normal / Student-t helpers used by
//! the quantile transform.
//!
//! Everything here is pure. Internal callers that sit inside sampler loops use
//! the log-space variants ([`ln_gamma_pq`]) so tail probabilities far below
//! `f64::MIN_POSITIVE` stay representable.

use crate::error::{domain, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const TINY: f64 = 1e-300;

/// Convergence controls for series and continued-fraction evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Accuracy {
    /// Tolerance used internally by the samplers and densities.
    pub const MACHINE: Accuracy = Accuracy {
        rel_tol: 1e-15,
        max_terms: 20_000,
    };

    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-4) {
            return Err(domain("Accuracy::new", format!("rel_tol {rel_tol} outside (0, 1e-4]")));
        }
        if max_terms < 16 {
            return Err(domain("Accuracy::new", format!("max_terms {max_terms} < 16")));
        }
        Ok(Accuracy { rel_tol, max_terms })
    }
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            rel_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln(1 - e^l)` for `l <= 0`.
pub(crate) fn ln_one_minus_exp(l: f64) -> f64 {
    if l > -std::f64::consts::LN_2 {
        (-l.exp_m1()).ln()
    } else {
        (-l.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Power series `Σ x^n / (a (a+1) ... (a+n))`, so that `γ(a,x) = x^a e^{-x} · sum`.
fn lower_series_sum(a: f64, x: f64, acc: Accuracy) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..acc.max_terms {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() <= sum.abs() * acc.rel_tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        func: "incomplete gamma series",
        terms: acc.max_terms,
    })
}

/// Continued fraction `h` with `Γ(a,x) = e^{-x} x^a h`, valid for any real `a`
/// and `x > 0` (modified Lentz). Converges fast once `x >= a + 1` or `x >= 1`.
fn upper_cf(a: f64, x: f64, acc: Accuracy) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = if b.abs() < TINY { 1.0 / TINY } else { 1.0 / b };
    let mut h = d;
    for i in 1..=acc.max_terms {
        let fi = i as f64;
        let an = -fi * (fi - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= acc.rel_tol {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        func: "incomplete gamma continued fraction",
        terms: acc.max_terms,
    })
}

fn check_gamma_args(func: &'static str, s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(func, format!("shape {s} must be positive and finite")));
    }
    if !(x >= 0.0) {
        return Err(domain(func, format!("argument {x} must be nonnegative")));
    }
    Ok(())
}

/// Log regularized incomplete gamma pair `(ln P(a,x), ln Q(a,x))` given
/// `ln Γ(a)` precomputed by the caller.
pub(crate) fn ln_gamma_pq_with(a: f64, x: f64, ln_gamma_a: f64, acc: Accuracy) -> Result<(f64, f64)> {
    if x == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if x == f64::INFINITY {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    if x < a + 1.0 {
        let lp = a * x.ln() - x + lower_series_sum(a, x, acc)?.ln() - ln_gamma_a;
        let lp = lp.min(0.0);
        Ok((lp, ln_one_minus_exp(lp)))
    } else {
        let lq = a * x.ln() - x + upper_cf(a, x, acc)?.ln() - ln_gamma_a;
        let lq = lq.min(0.0);
        Ok((ln_one_minus_exp(lq), lq))
    }
}

/// `(ln P(a,x), ln Q(a,x))` for the regularized lower/upper incomplete gamma.
pub fn ln_gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    check_gamma_args("ln_gamma_pq", a, x)?;
    ln_gamma_pq_with(a, x, ln_gamma(a), Accuracy::MACHINE)
}

/// Lower incomplete gamma `γ(s,x) = ∫₀^x t^{s-1} e^{-t} dt`.
pub fn lower_inc_gamma(s: f64, x: f64, acc: Accuracy) -> Result<f64> {
    check_gamma_args("lower_inc_gamma", s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let lg = ln_gamma(s);
    let (lp, _) = ln_gamma_pq_with(s, x, lg, acc)?;
    Ok((lg + lp).exp())
}

/// Upper incomplete gamma `Γ(s,x) = ∫_x^∞ t^{s-1} e^{-t} dt` for `s > 0`.
pub fn upper_inc_gamma(s: f64, x: f64, acc: Accuracy) -> Result<f64> {
    check_gamma_args("upper_inc_gamma", s, x)?;
    let lg = ln_gamma(s);
    let (_, lq) = ln_gamma_pq_with(s, x, lg, acc)?;
    Ok((lg + lq).exp())
}

/// `x^{-s} γ(s,x)`, finite as `x → 0+` (limit `1/s`) and free of the
/// `x^{-s}` overflow when `s` is large and `x` small.
pub fn lower_gamma_scaled(s: f64, x: f64, acc: Accuracy) -> Result<f64> {
    check_gamma_args("lower_gamma_scaled", s, x)?;
    if x == 0.0 {
        return Ok(1.0 / s);
    }
    if x < s + 1.0 {
        Ok((-x).exp() * lower_series_sum(s, x, acc)?)
    } else {
        let lg = ln_gamma(s);
        let (lp, _) = ln_gamma_pq_with(s, x, lg, acc)?;
        Ok((lg + lp - s * x.ln()).exp())
    }
}

/// `ln Γ(1+ε) / ε` for small `|ε|` via the zeta series.
fn ln_gamma_1p_over(eps: f64) -> f64 {
    const ZETA: [f64; 7] = [
        1.644_934_066_848_226_4,
        1.202_056_903_159_594_3,
        1.082_323_233_711_138_2,
        1.036_927_755_143_37,
        1.017_343_061_984_449,
        1.008_349_277_381_922_8,
        1.004_077_356_197_944_3,
    ];
    // Σ_{k≥2} (-1)^k ζ(k) ε^{k-1} / k
    let mut acc = -EULER_GAMMA;
    let mut pow = 1.0;
    for (i, z) in ZETA.iter().enumerate() {
        let k = (i + 2) as f64;
        pow *= -eps;
        acc -= z * pow / k;
    }
    acc
}

/// Generalized exponential integral `E_s(x) = ∫₁^∞ e^{-xt} t^{-s} dt` for
/// real `s` and `x > 0`.
///
/// Uses `E_s(x) = x^{s-1} Γ(1-s, x)`: a continued fraction for `x >= 1`, and
/// for `x < 1` the power series of `Γ(1-s, x)` with the pole of `Γ(1-s)` at
/// integer `s` cancelled analytically against the matching series term.
pub fn exp_integral_e(s: f64, x: f64, acc: Accuracy) -> Result<f64> {
    if x >= 1.0 && x.is_finite() && s.is_finite() {
        return Ok((-x).exp() * upper_cf(1.0 - s, x, acc)?);
    }
    exp_integral_e_small(s, x, acc)
}

/// `e^x E_s(x)`, which stays representable for large `x`.
pub fn exp_integral_e_scaled(s: f64, x: f64, acc: Accuracy) -> Result<f64> {
    if x >= 1.0 && x.is_finite() && s.is_finite() {
        return upper_cf(1.0 - s, x, acc);
    }
    Ok(x.exp() * exp_integral_e_small(s, x, acc)?)
}

fn exp_integral_e_small(s: f64, x: f64, acc: Accuracy) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(
            "exp_integral_e",
            format!("argument {x} must be positive and finite"),
        ));
    }
    if !s.is_finite() {
        return Err(domain("exp_integral_e", format!("order {s} must be finite")));
    }
    let a = 1.0 - s;
    if s - 1.0 <= -0.5 {
        // a >= 1/2: no pole nearby.
        let lg = ln_gamma(a);
        let (_, lq) = ln_gamma_pq_with(a, x, lg, acc)?;
        return Ok((lg + lq - a * x.ln()).exp());
    }

    let m = (s - 1.0).round() as usize;
    let eps = a + m as f64;

    // D = [ln Γ(1+ε) - Σ_{i≤m} ln(1 - ε/i)] / ε - ln x
    let lg_over = if eps == 0.0 {
        -EULER_GAMMA
    } else if eps.abs() < 1e-3 {
        ln_gamma_1p_over(eps)
    } else {
        ln_gamma(1.0 + eps) / eps
    };
    let mut log_prod_over = 0.0;
    for i in 1..=m {
        let fi = i as f64;
        log_prod_over += if eps == 0.0 {
            -1.0 / fi
        } else {
            (-eps / fi).ln_1p() / eps
        };
    }
    let d = lg_over - log_prod_over - x.ln();

    let mut pow_fact = 1.0; // (-x)^n / n!
    for n in 1..=m {
        pow_fact *= -x / n as f64;
    }
    let lead = pow_fact * if eps == 0.0 { d } else { (eps * d).exp_m1() / eps };

    let mut series = 0.0;
    let mut t = 1.0;
    let mut n = 0usize;
    loop {
        if n != m {
            let term = t / (n as f64 + a);
            series += term;
            if n > m && term.abs() <= acc.rel_tol * (lead - series).abs() {
                break;
            }
        }
        n += 1;
        if n > acc.max_terms + m {
            return Err(Error::NonConvergence {
                func: "exp_integral_e series",
                terms: acc.max_terms,
            });
        }
        t *= -x / n as f64;
    }
    Ok(lead - series)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of the standard normal CDF on `(0, 1)`.
///
/// Rational approximation (Acklam) polished by two Halley steps against the
/// complementary error function; the lower tail is always the one refined.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("normal_quantile", format!("probability {p} outside (0, 1)")));
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1]
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let dens = normal_pdf(x);
        if dens == 0.0 {
            break;
        }
        let e = normal_cdf(x) - p;
        let u = e / dens;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    statrs::function::beta::beta_reg(a, b, x)
}

/// Student-t CDF with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    check_t_args(t, df)?;
    Ok(t_lower(t, df))
}

/// Student-t survival function `1 - F(t)`, computed without cancellation.
pub fn student_t_sf(t: f64, df: f64) -> Result<f64> {
    check_t_args(t, df)?;
    Ok(t_lower(-t, df))
}

fn check_t_args(t: f64, df: f64) -> Result<()> {
    if !(df > 0.0) || !df.is_finite() {
        return Err(domain(
            "student_t_cdf",
            format!("degrees of freedom {df} must be positive"),
        ));
    }
    if t.is_nan() {
        return Err(domain("student_t_cdf", "argument is NaN"));
    }
    Ok(())
}

fn t_lower(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let x = df / (df + t * t);
    let tail = 0.5 * beta_reg(0.5 * df, 0.5, x);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}
