//! Sampler-versus-exact-weight checks for the stationary measures: the
//! chi-square window test, the gradient expectation, and the qualitative
//! correlation decay.

use fep_core::config::ExclusionConfig;
use fep_core::local::h_local;
use fep_core::measures::{gcm_weight_f64, sample_gcm, script_h};

/// Window occupancies of a sampled configuration as a bit pattern.
fn window_bits(eta: &ExclusionConfig) -> usize {
    (0..eta.size()).map(|x| (eta.get(x) as usize) << x).sum()
}

#[test]
fn window_frequencies_match_exact_weights_chi_square() {
    // 4-site windows at ρ = 3/4, 10^6 samples, 1% significance.
    let rho = 0.75;
    let len = 4usize;
    let samples = 1_000_000u64;
    let mut counts = vec![0u64; 1 << len];
    for seed in 0..samples {
        let eta = sample_gcm(rho, len, seed).unwrap();
        counts[window_bits(&eta)] += 1;
    }
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for bits in 0..1usize << len {
        let sigma: Vec<u8> = (0..len).map(|i| (bits >> i & 1) as u8).collect();
        let p = gcm_weight_f64(&sigma, rho).unwrap();
        if p == 0.0 {
            assert_eq!(counts[bits], 0, "impossible window {bits:04b} sampled");
        } else {
            let expected = p * samples as f64;
            let diff = counts[bits] as f64 - expected;
            chi2 += diff * diff / expected;
            dof += 1;
        }
    }
    // χ²_{0.99} with 8 - 1 = 7 degrees of freedom
    assert_eq!(dof, 8);
    assert!(chi2 < 18.475, "chi-square statistic {chi2}");
}

#[test]
fn sampled_gradient_expectation_matches_flux() {
    // Empirical mean of h under the ρ = 3/4 measure vs H(3/4) = 2/3,
    // estimated on one long stationary window.
    let rho = 0.75;
    let n = 1_000_000usize;
    let eta = sample_gcm(rho, n, 424_242).unwrap();
    let mean: f64 =
        (1..n - 1).map(|x| h_local(&eta, x) as f64).sum::<f64>() / (n - 2) as f64;
    let target = script_h(rho).unwrap();
    // h is an indicator here; correlations are short-range, allow 5x
    // binomial spread
    let se = (target * (1.0 - target) / n as f64).sqrt();
    assert!(
        (mean - target).abs() < 5.0 * se,
        "mean h {mean} vs H(3/4) {target} (se {se})"
    );
}

#[test]
fn pair_correlations_decay_with_distance() {
    // |cov(η_0, η_d)| falls off; compare short and mid distances on a long
    // stationary window (qualitative envelope check).
    let rho = 0.75;
    let n = 2_000_000usize;
    let eta = sample_gcm(rho, n, 777).unwrap();
    let occ: Vec<f64> = (0..n).map(|x| eta.occ(x) as f64).collect();
    let mean = occ.iter().sum::<f64>() / n as f64;
    let cov = |d: usize| -> f64 {
        let mut acc = 0.0;
        for x in 0..n - d {
            acc += (occ[x] - mean) * (occ[x + d] - mean);
        }
        acc / (n - d) as f64
    };
    let near = (1..=2).map(|d| cov(d).abs()).fold(0.0f64, f64::max);
    let far = (5..=7).map(|d| cov(d).abs()).fold(0.0f64, f64::max);
    assert!(near > 0.01, "short-range correlation should be visible, got {near}");
    assert!(far < 0.5 * near, "correlations do not decay: near {near}, far {far}");
}
