use glt_core::analysis::{mse_metrics, normal_means_rb, quantile_sorted, rank_coefficients, shrinkage_pairs};
use glt_core::{summarize, ChainOutput};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn chain(beta_rows: &[Vec<f64>], tau: Vec<f64>) -> ChainOutput {
    let s = beta_rows.len();
    let p = beta_rows[0].len();
    let flat: Vec<f64> = beta_rows.iter().flatten().copied().collect();
    ChainOutput {
        beta: DMatrix::from_row_slice(s, p, &flat),
        sigma2: vec![1.0; s],
        lambda: DMatrix::from_fn(s, p, |i, j| 1.0 + (i * (j + 1)) as f64 * 0.1),
        tau,
        xi: None,
        log_lik: vec![0.0; s],
        diagnostics: Default::default(),
        response_sd: 1.0,
    }
}

#[test]
fn interval_endpoints_by_hand() {
    // 20 draws 0..19: h = 19 * 0.025 = 0.475 and 19 * 0.975 = 18.525
    let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
    let s = summarize(&chain(&rows, (1..=20).map(|i| i as f64).collect())).unwrap();
    assert!((s.beta_lower[0] - 0.475).abs() < 1e-14);
    assert!((s.beta_upper[0] - 18.525).abs() < 1e-14);
    assert_eq!(s.beta_mean[0], 9.5);
    assert_eq!(s.tau_median, 10.5);
    assert!((s.cor_lambda_tau[0] - 1.0).abs() < 1e-12);
    assert!(s.xi_mean.is_none() && s.cor_lambda_xi.is_none());
    let five = [3.0, 1.0, 2.0, 5.0, 4.0];
    let mut sorted = five;
    sorted.sort_by(f64::total_cmp);
    assert!((quantile_sorted(&sorted, 0.025) - 1.1).abs() < 1e-15);
    assert!((quantile_sorted(&sorted, 0.975) - 4.9).abs() < 1e-15);
}

#[test]
fn summary_ignores_draw_order() {
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64).sqrt()])
        .collect();
    let tau: Vec<f64> = (0..30).map(|i| 1.0 + (i % 7) as f64).collect();
    let a = summarize(&chain(&rows, tau.clone())).unwrap();
    let mut rrows = rows.clone();
    rrows.reverse();
    let mut rtau = tau;
    rtau.reverse();
    let b = summarize(&chain(&rrows, rtau)).unwrap();
    for j in 0..2 {
        assert!((a.beta_mean[j] - b.beta_mean[j]).abs() < 1e-14);
        assert_eq!(a.beta_lower[j], b.beta_lower[j]);
        assert_eq!(a.beta_upper[j], b.beta_upper[j]);
    }
    assert_eq!(a.tau_median, b.tau_median);
}

#[test]
fn mse_zero_estimate() {
    for &(p, q) in &[(10usize, 3usize), (5, 0), (4, 4)] {
        let truth: Vec<f64> = (0..p).map(|j| if j < q { 1.0 } else { 0.0 }).collect();
        let m = mse_metrics(&vec![0.0; p], &truth, q).unwrap();
        assert!((m.mse - q as f64 / p as f64).abs() < 1e-15);
        assert_eq!(m.mse_s, if q > 0 { 1.0 } else { 0.0 });
        assert_eq!(m.mse_n, 0.0);
    }
    assert!(mse_metrics(&[0.0; 2], &[1.0, 0.0, 0.0], 1).is_err());
}

#[test]
fn ranking_matches_sort() {
    let rows: Vec<Vec<f64>> = (0..20).map(|_| vec![0.2, -3.0, 1.5, -0.1, 3.0]).collect();
    let s = summarize(&chain(&rows, vec![1.0; 20])).unwrap();
    let r = rank_coefficients(&s, 5).unwrap();
    let idx: Vec<usize> = r.iter().map(|c| c.index).collect();
    // |−3| ties |3|; the earlier index wins
    assert_eq!(idx, vec![1, 4, 2, 0, 3]);
    assert_eq!(r.iter().map(|c| c.sign).collect::<Vec<_>>(), vec![-1, 1, 1, 1, -1]);

    let zeros: Vec<Vec<f64>> = (0..20).map(|_| vec![0.0; 4]).collect();
    let s = summarize(&chain(&zeros, vec![1.0; 20])).unwrap();
    let r = rank_coefficients(&s, 4).unwrap();
    assert_eq!(r.iter().map(|c| c.index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    assert!(r.iter().all(|c| c.sign == 0));
    assert!(rank_coefficients(&s, 5).is_err());
}

#[test]
fn rao_blackwell_by_hand() {
    let mut c = chain(&[vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 0.5]);
    c.lambda = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1e200]);
    // horseshoe: d = λ²τ²
    let rb = normal_means_rb(&c, &[2.0, -1.0]).unwrap();
    let want0 = 2.0 * 0.5 * (0.5 + 2.25 / 3.25);
    let want1 = -0.5 * (0.8 + 1.0);
    assert!((rb[0] - want0).abs() < 1e-15, "{}", rb[0]);
    assert!((rb[1] - want1).abs() < 1e-15, "{}", rb[1]);
    // GLT: d = λ²
    c.xi = Some(vec![1.0, 1.0]);
    let rb = normal_means_rb(&c, &[2.0, -1.0]).unwrap();
    assert!((rb[0] - (0.5 + 0.9)).abs() < 1e-15);
    assert!(normal_means_rb(&c, &[1.0]).is_err());
}

#[test]
fn shrinkage_pairs_sorted() {
    let pairs = shrinkage_pairs(&[2.0, -1.0, 0.5], &[1.8, -0.1, 0.01]).unwrap();
    assert_eq!(pairs, vec![(-1.0, -0.1), (0.5, 0.01), (2.0, 1.8)]);
    assert!(shrinkage_pairs(&[1.0], &[]).is_err());
}

proptest! {
    #[test]
    fn mse_decomposes(est in prop::collection::vec(-3.0f64..3.0, 1..40), frac in 0.0f64..1.0) {
        let p = est.len();
        let q = ((p as f64) * frac) as usize;
        let truth: Vec<f64> = (0..p).map(|j| if j < q { 1.0 } else { 0.0 }).collect();
        let m = mse_metrics(&est, &truth, q).unwrap();
        let direct = est.iter().zip(&truth).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / p as f64;
        prop_assert!((m.mse - direct).abs() < 1e-12);
        let recomposed = (q as f64 * m.mse_s + (p - q) as f64 * m.mse_n) / p as f64;
        prop_assert!((m.mse - recomposed).abs() < 1e-12);
    }

    #[test]
    fn ranking_scale_invariant(means in prop::collection::vec(-5.0f64..5.0, 1..30), c in 0.1f64..10.0) {
        let p = means.len();
        let rows: Vec<Vec<f64>> = (0..20).map(|_| means.clone()).collect();
        let scaled: Vec<Vec<f64>> = (0..20).map(|_| means.iter().map(|m| m * c).collect()).collect();
        let a = rank_coefficients(&summarize(&chain(&rows, vec![1.0; 20])).unwrap(), p).unwrap();
        let b = rank_coefficients(&summarize(&chain(&scaled, vec![1.0; 20])).unwrap(), p).unwrap();
        // scaling can only reorder exact ties, which it preserves
        let ia: Vec<usize> = a.iter().map(|r| r.index).collect();
        let ib: Vec<usize> = b.iter().map(|r| r.index).collect();
        prop_assert_eq!(ia, ib);
        // descending by magnitude, as a plain sort would give
        prop_assert!(a.windows(2).all(|w| w[0].mean.abs() >= w[1].mean.abs()));
    }
}
