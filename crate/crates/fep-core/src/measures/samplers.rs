//! Seeded samplers for the initial and invariant measures.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExclusionConfig, ZeroRangeConfig};
use crate::measures::{MeasureError, ProfileSpec};
use crate::seeds::derive_seed;

/// Inhomogeneous Bernoulli product measure fitting the profile:
/// independent sites with `P(η_x = 1) = ρ(x/N)`.
pub fn sample_mu_n(
    profile: &ProfileSpec,
    n: usize,
    seed: u64,
) -> Result<ExclusionConfig, MeasureError> {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta = ExclusionConfig::empty(n);
    for x in 0..n {
        let u = x as f64 / n as f64;
        let p = profile.eval(u);
        if !(0.0..=1.0).contains(&p) {
            return Err(MeasureError::ProfileOutOfRange { u, value: p });
        }
        if rng.random::<f64>() < p {
            eta.set(x, true);
        }
    }
    Ok(eta)
}

/// One gap draw: `P(g = p) = (1/α)(1 - 1/α)^{p-1}`, `p ≥ 1` (mean `α`).
fn geometric_gap(alpha: f64, rng: &mut ChaCha8Rng) -> u64 {
    if alpha <= 1.0 {
        return 1;
    }
    let tail = (1.0 - 1.0 / alpha).ln();
    let u: f64 = rng.random();
    1 + ((1.0 - u).ln() / tail).floor() as u64
}

/// Window of the supercritical stationary measure at density `ρ ∈ (1/2,1)`,
/// built by the renewal of empty sites with geometric particle gaps.
///
/// The first empty site is placed with the size-biased residual law, so the
/// window marginals are translation invariant and match [`super::gcm_weight`]
/// (see the chi-square test in the crate's integration suite).
pub fn sample_gcm(rho: f64, len: usize, seed: u64) -> Result<ExclusionConfig, MeasureError> {
    if !(rho > 0.5 && rho < 1.0) {
        return Err(MeasureError::SupercriticalDensityRequired(rho));
    }
    assert!(len >= 1);
    let alpha = rho / (1.0 - rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta = ExclusionConfig::filled(len);
    // P(first zero at 0) = 1-ρ; conditionally on ≥ 1 the law is the gap law.
    let mut zero = if rng.random::<f64>() < 1.0 - rho {
        0
    } else {
        geometric_gap(alpha, &mut rng) as usize
    };
    while zero < len {
        eta.set(zero, false);
        zero += geometric_gap(alpha, &mut rng) as usize + 1;
    }
    Ok(eta)
}

/// Like [`sample_gcm`] but valid as a ring: re-draws (deterministically in
/// the seed) until the wrap edge is not a pair of empty sites, so the
/// result is ergodic on the full torus.
pub fn sample_gcm_ring(rho: f64, n: usize, seed: u64) -> Result<ExclusionConfig, MeasureError> {
    assert!(n >= 2);
    for attempt in 0.. {
        let eta = sample_gcm(rho, n, derive_seed(seed, attempt))?;
        if eta.get(n - 1) || eta.get(0) {
            return Ok(eta);
        }
    }
    unreachable!()
}

/// Subcritical stationary measure: the two alternating configurations with
/// probability 1/2 each. Alternation needs an even torus.
pub fn sample_subcritical(rho: f64, n: usize, seed: u64) -> Result<ExclusionConfig, MeasureError> {
    if !(0.0..=0.5).contains(&rho) {
        return Err(MeasureError::SubcriticalDensityRequired(rho));
    }
    if n % 2 != 0 {
        return Err(MeasureError::OddTorus(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = rng.random::<bool>() as usize;
    let mut eta = ExclusionConfig::empty(n);
    for x in 0..n {
        eta.set(x, x % 2 == offset);
    }
    Ok(eta)
}

/// Product geometric measure on zero-range configurations: i.i.d. sites
/// with `P(ω = p) = (1/α)(1 - 1/α)^{p-1}`, `p ≥ 1`, mean `α`.
pub fn sample_nu_alpha(alpha: f64, k: usize, seed: u64) -> Result<ZeroRangeConfig, MeasureError> {
    if !(alpha >= 1.0) {
        return Err(MeasureError::AlphaOutOfRange(alpha));
    }
    assert!(k >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = (0..k).map(|_| geometric_gap(alpha, &mut rng) as u32).collect();
    Ok(ZeroRangeConfig::from_counts(counts).expect("k >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{classify, Classification};

    #[test]
    fn bernoulli_extremes() {
        let ones = ProfileSpec::Constant { value: 1.0 };
        assert_eq!(sample_mu_n(&ones, 40, 3).unwrap(), ExclusionConfig::filled(40));
        let zeros = ProfileSpec::Constant { value: 0.0 };
        assert_eq!(sample_mu_n(&zeros, 40, 3).unwrap(), ExclusionConfig::empty(40));
    }

    #[test]
    fn bernoulli_mean_within_ci() {
        let p = ProfileSpec::Constant { value: 0.7 };
        let n = 100_000;
        let eta = sample_mu_n(&p, n, 99).unwrap();
        let mean = eta.particle_count() as f64 / n as f64;
        let se = (0.7f64 * 0.3 / n as f64).sqrt();
        assert!((mean - 0.7).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn bernoulli_rejects_bad_profile() {
        let p = ProfileSpec::Sine { mean: 0.9, amplitude: 0.5 };
        assert!(matches!(
            sample_mu_n(&p, 64, 0),
            Err(MeasureError::ProfileOutOfRange { .. })
        ));
    }

    #[test]
    fn gcm_windows_have_no_adjacent_zeros() {
        for seed in 0..200 {
            let eta = sample_gcm(0.75, 64, seed).unwrap();
            for x in 0..63 {
                assert!(eta.get(x) || eta.get(x + 1), "seed {seed}");
            }
        }
    }

    #[test]
    fn gcm_pair_probability_matches_exact_weight() {
        // P(η_0 = 1, η_1 = 1) = 2ρ-1 = 1/2 at ρ = 3/4.
        let trials = 200_000u32;
        let mut hits = 0u32;
        for seed in 0..trials {
            let eta = sample_gcm(0.75, 2, seed as u64).unwrap();
            if eta.get(0) && eta.get(1) {
                hits += 1;
            }
        }
        let frac = hits as f64 / trials as f64;
        let se = (0.25f64 / trials as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * se, "fraction {frac}");
    }

    #[test]
    fn gcm_ring_is_ergodic() {
        for seed in 0..50 {
            let eta = sample_gcm_ring(0.75, 128, seed).unwrap();
            assert_eq!(classify(&eta), Classification::Ergodic);
        }
    }

    #[test]
    fn subcritical_alternation() {
        let mut seen = [false; 2];
        for seed in 0..32 {
            let eta = sample_subcritical(0.4, 10, seed).unwrap();
            assert_eq!(eta.particle_count(), 5);
            assert_eq!(classify(&eta), Classification::Both);
            seen[eta.get(0) as usize] = true;
        }
        assert!(seen[0] && seen[1], "both alternating phases must occur");
        assert!(matches!(sample_subcritical(0.4, 9, 0), Err(MeasureError::OddTorus(9))));
        assert!(sample_subcritical(0.7, 10, 0).is_err());
    }

    #[test]
    fn nu_alpha_support_and_mean() {
        let omega = sample_nu_alpha(1.0, 50, 7).unwrap();
        assert!(omega.counts().iter().all(|&c| c == 1));
        let alpha = 2.5;
        let k = 50_000;
        let omega = sample_nu_alpha(alpha, k, 13).unwrap();
        assert!(omega.counts().iter().all(|&c| c >= 1));
        let mean = omega.total_mass() as f64 / k as f64;
        // Var = α(α-1)
        let se = (alpha * (alpha - 1.0) / k as f64).sqrt();
        assert!((mean - alpha).abs() < 3.0 * se, "mean {mean}");
        assert!(sample_nu_alpha(0.9, 4, 0).is_err());
    }
}
