mod common;

use common::{batch_se, ks_distance, mean, variance};
use glt_core::distributions::ChainRng;
use glt_core::ess::{ess_step, EllipseSpec};
use glt_core::specfun::normal_cdf;

#[test]
fn flat_likelihood_samples_the_prior() {
    let spec = EllipseSpec::new(0.4, 0.001).unwrap();
    let mut rng = ChainRng::new(1, 0);
    let mut eta = 0.0;
    let mut draws = Vec::with_capacity(100_000);
    for _ in 0..100_000 {
        let s = ess_step(eta, spec, |_| 0.0, &mut rng).unwrap();
        assert_eq!(s.proposals, 1);
        eta = s.eta;
        draws.push(eta);
    }
    let sd = spec.variance.sqrt();
    let d = ks_distance(&draws[100..], |x| normal_cdf((x - spec.center) / sd));
    assert!(d < 0.01, "KS {d}");
}

#[test]
fn gaussian_likelihood_matches_conjugate_posterior() {
    let (mu0, v0) = (1.0, 0.5);
    let (m, s2) = (-0.5, 0.25);
    let spec = EllipseSpec::new(mu0, v0).unwrap();
    let ll = |e: f64| -0.5 * (e - m) * (e - m) / s2;
    let post_var = 1.0 / (1.0 / v0 + 1.0 / s2);
    let post_mean = post_var * (mu0 / v0 + m / s2);
    let mut rng = ChainRng::new(2, 0);
    let mut eta = 0.0;
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            eta = ess_step(eta, spec, ll, &mut rng).unwrap().eta;
            eta
        })
        .collect();
    let se = batch_se(&draws, 50);
    assert!(
        (mean(&draws) - post_mean).abs() < 3.0 * se,
        "{} vs {post_mean}",
        mean(&draws)
    );
    let sq: Vec<f64> = draws.iter().map(|x| (x - post_mean).powi(2)).collect();
    assert!((variance(&draws) - post_var).abs() < 3.0 * batch_se(&sq, 50));
}

#[test]
fn translation_equivariant_under_shared_stream() {
    let delta = 0.73;
    let ll = |e: f64| -(e - 0.2).powi(4);
    let a_spec = EllipseSpec::new(0.1, 0.3).unwrap();
    let b_spec = EllipseSpec::new(0.1 - delta, 0.3).unwrap();
    let mut ra = ChainRng::new(3, 0);
    let mut rb = ChainRng::new(3, 0);
    let (mut a, mut b) = (0.5, 0.5 - delta);
    for _ in 0..2000 {
        a = ess_step(a, a_spec, ll, &mut ra).unwrap().eta;
        b = ess_step(b, b_spec, |e| ll(e + delta), &mut rb).unwrap().eta;
        assert!((a - (b + delta)).abs() < 1e-9, "{a} {b}");
    }
}

#[test]
fn bracket_loop_terminates() {
    // a narrow likelihood far from the prior center forces many shrinks
    let spec = EllipseSpec::new(0.0, 1.0).unwrap();
    let ll = |e: f64| -0.5 * (e - 3.0).powi(2) / 1e-6;
    let mut rng = ChainRng::new(4, 0);
    let mut eta = 3.0;
    let mut worst = 0;
    for _ in 0..10_000 {
        let s = ess_step(eta, spec, ll, &mut rng).unwrap();
        assert!(!s.capped);
        worst = worst.max(s.proposals);
        eta = s.eta;
    }
    assert!(worst < 200, "{worst}");
}
