//! Truncated gamma / inverse-gamma draws by exact inversion of the CDF in
//! log space.
//!
//! The interval is parametrized through whichever of `ln P` or `ln Q` keeps
//! the truncated mass well away from cancellation, so regions with mass far
//! below `f64::MIN_POSITIVE` still invert correctly.

use rand::Rng;

use super::uniform_open;
use crate::error::{domain, Error, Result};
use crate::specfun::{ln_add_exp, ln_gamma, ln_gamma_pq_with, ln_one_minus_exp, Accuracy};

const LN_HALF: f64 = -std::f64::consts::LN_2;
const TOL: f64 = 1e-12;
const MAX_ITER: usize = 400;

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Lower,
    Upper,
}

/// Draw `x ~ IG(a, b)` restricted to `(lo, hi)`; `hi` may be infinite.
pub fn invgamma_sample_truncated<R: Rng + ?Sized>(a: f64, b: f64, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(domain(
            "invgamma_sample_truncated",
            format!("need shape > 0 and rate > 0, got ({a}, {b})"),
        ));
    }
    if !(lo >= 0.0) || !(hi > lo) {
        return Err(domain(
            "invgamma_sample_truncated",
            format!("bad interval ({lo}, {hi})"),
        ));
    }
    let ylo = if hi == f64::INFINITY { 0.0 } else { b / hi };
    let yhi = if lo == 0.0 { f64::INFINITY } else { b / lo };
    let y = gamma_sample_truncated(a, ylo, yhi, rng).map_err(|e| match e {
        Error::DegenerateMass { .. } => Error::DegenerateMass { lo, hi },
        other => other,
    })?;
    Ok((b / y).clamp(lo, hi))
}

/// Draw `y ~ Gamma(a, 1)` restricted to `(lo, hi)`; `hi` may be infinite.
pub fn gamma_sample_truncated<R: Rng + ?Sized>(a: f64, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("gamma_sample_truncated", format!("shape {a} must be positive")));
    }
    if !(lo >= 0.0) || !(hi > lo) {
        return Err(domain("gamma_sample_truncated", format!("bad interval ({lo}, {hi})")));
    }
    let acc = Accuracy::MACHINE;
    let lg = ln_gamma(a);
    let (lp_lo, lq_lo) = ln_gamma_pq_with(a, lo, lg, acc)?;
    let (lp_hi, lq_hi) = ln_gamma_pq_with(a, hi, lg, acc)?;
    // the draw is monotone increasing in u on every branch
    let u = uniform_open(rng);

    let (side, target) = if lp_hi <= LN_HALF {
        let ln_mass = lp_hi + ln_one_minus_exp(lp_lo - lp_hi);
        if !ln_mass.is_finite() {
            return Err(Error::DegenerateMass { lo, hi });
        }
        (Side::Lower, ln_add_exp(lp_lo, u.ln() + ln_mass))
    } else if lq_lo <= LN_HALF {
        let ln_mass = lq_lo + ln_one_minus_exp(lq_hi - lq_lo);
        if !ln_mass.is_finite() {
            return Err(Error::DegenerateMass { lo, hi });
        }
        (Side::Upper, ln_add_exp(lq_hi, (-u).ln_1p() + ln_mass))
    } else {
        // interval straddles the median: both end probabilities are O(1)
        let p_lo = lp_lo.exp();
        let p_hi = lp_hi.exp();
        let mass = p_hi - p_lo;
        if !(mass > 0.0) {
            return Err(Error::DegenerateMass { lo, hi });
        }
        let p = p_lo + u * mass;
        if p <= 0.5 {
            (Side::Lower, p.ln())
        } else {
            let q = (1.0 - p_hi) + (1.0 - u) * mass;
            (Side::Upper, q.ln())
        }
    };
    Ok(invert(a, lg, side, target, lo, hi))
}

/// Initial guess from the leading tail behaviour on each side.
fn initial_guess(a: f64, lg: f64, side: Side, target: f64) -> f64 {
    match side {
        // P(a, y) ≈ y^a / Γ(a+1) for small y
        Side::Lower => ((target + lg + a.ln()) / a).exp(),
        // ln Q(a, y) ≈ (a-1) ln y - y - ln Γ(a) for large y
        Side::Upper => {
            let mut y = (-target).max(a);
            for _ in 0..3 {
                y = (-target + (a - 1.0) * y.ln() - lg).max(1e-300);
            }
            y
        }
    }
}

/// Safeguarded Newton on `ln P(y) = target` (in `ln y`) or `ln Q(y) = target`
/// (in `y`), with bisection whenever the step leaves the bracket.
fn invert(a: f64, lg: f64, side: Side, target: f64, lo: f64, hi: f64) -> f64 {
    let acc = Accuracy::MACHINE;
    let (mut lo, mut hi) = (lo, hi);
    let mut y = initial_guess(a, lg, side, target);
    if !(y > lo && y < hi) {
        y = bisect_point(lo, hi);
    }
    for _ in 0..MAX_ITER {
        let Ok((lp, lq)) = ln_gamma_pq_with(a, y, lg, acc) else {
            return y;
        };
        let ln_f = (a - 1.0) * y.ln() - y - lg;
        let (h, next) = match side {
            Side::Lower => {
                let h = lp - target;
                if h > 0.0 {
                    hi = y;
                } else {
                    lo = y;
                }
                // d ln P / d ln y = y f(y) / P(y)
                let slope = (ln_f + y.ln() - lp).exp();
                (h, (y.ln() - h / slope).exp())
            }
            Side::Upper => {
                let h = lq - target;
                if h > 0.0 {
                    lo = y;
                } else {
                    hi = y;
                }
                let slope = -(ln_f - lq).exp();
                (h, y - h / slope)
            }
        };
        if h.abs() < TOL {
            return y;
        }
        if hi.is_finite() && hi - lo <= 4.0 * f64::EPSILON * hi {
            return 0.5 * (lo + hi);
        }
        y = if next > lo && next < hi && next.is_finite() {
            next
        } else {
            bisect_point(lo, hi)
        };
    }
    y
}

fn bisect_point(lo: f64, hi: f64) -> f64 {
    if hi == f64::INFINITY {
        (2.0 * lo).max(lo + 1.0)
    } else if lo > 0.0 && hi / lo > 4.0 {
        (lo * hi).sqrt()
    } else if lo == 0.0 {
        0.5 * hi.min(1.0)
    } else {
        0.5 * (lo + hi)
    }
}
