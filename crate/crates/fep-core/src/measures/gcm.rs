//! Exact-arithmetic evaluators for the stationary measures.
//!
//! Window weights of the supercritical grand-canonical measure, the
//! stationarity residual of the infinite-volume generator, the expectation
//! of the gradient function, and the detailed-balance residual of the
//! geometric zero-range measures. Everything here is rational arithmetic
//! over big integers; a float fallback is provided for sampling checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::measures::MeasureError;

pub fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rat_pow(q: &BigRational, e: i64) -> BigRational {
    let mut out = BigRational::one();
    let base = if e >= 0 { q.clone() } else { q.recip() };
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}

fn f64_of(q: &BigRational) -> f64 {
    let num = q.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = q.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

/// No adjacent pair of empty sites (segment semantics, wrap ignored).
pub fn is_ergodic_pattern(sigma: &[u8]) -> bool {
    sigma.windows(2).all(|w| w[0] + w[1] >= 1)
}

fn check_supercritical(rho: &BigRational) -> Result<(), MeasureError> {
    let half = big_ratio(1, 2);
    if *rho <= half || *rho >= BigRational::one() {
        return Err(MeasureError::SupercriticalDensityRequired(f64_of(rho)));
    }
    Ok(())
}

/// Window weight of the supercritical stationary measure on `Λ_ℓ`
/// (`ℓ + 1 = sigma.len()` sites):
///
/// `1{σ ergodic} (1-ρ) ((1-ρ)/ρ)^{ℓ-p} ((2ρ-1)/ρ)^{2p-ℓ-σ_0-σ_ℓ}`
///
/// with `p` the particle count of the window. Weights over all windows of
/// a given length sum to one, and marginalizing the last site reproduces
/// the shorter window weight (both are exercised by the tests).
pub fn gcm_weight(sigma: &[u8], rho: &BigRational) -> Result<BigRational, MeasureError> {
    check_supercritical(rho)?;
    assert!(!sigma.is_empty());
    if !is_ergodic_pattern(sigma) {
        return Ok(BigRational::zero());
    }
    let ell = (sigma.len() - 1) as i64;
    let p = sigma.iter().map(|&s| s as i64).sum::<i64>();
    let one = BigRational::one();
    let q = &one - rho; // 1-ρ
    let a = &q / rho; // (1-ρ)/ρ
    let b = (rho + rho - &one) / rho; // (2ρ-1)/ρ
    let expo_b = 2 * p - ell - sigma[0] as i64 - sigma[sigma.len() - 1] as i64;
    Ok(q * rat_pow(&a, ell - p) * rat_pow(&b, expo_b))
}

/// Float version of [`gcm_weight`] for Monte Carlo comparisons.
pub fn gcm_weight_f64(sigma: &[u8], rho: f64) -> Result<f64, MeasureError> {
    if !(rho > 0.5 && rho < 1.0) {
        return Err(MeasureError::SupercriticalDensityRequired(rho));
    }
    if !is_ergodic_pattern(sigma) {
        return Ok(0.0);
    }
    let ell = (sigma.len() - 1) as i32;
    let p = sigma.iter().map(|&s| s as i32).sum::<i32>();
    let q = 1.0 - rho;
    let expo_b = 2 * p - ell - sigma[0] as i32 - sigma[sigma.len() - 1] as i32;
    Ok(q * (q / rho).powi(ell - p) * ((2.0 * rho - 1.0) / rho).powi(expo_b))
}

/// All `2^len` window weights, indexed by the occupancy bits
/// (bit `i` = site `i`).
pub fn window_weights(len: usize, rho: &BigRational) -> Result<Vec<BigRational>, MeasureError> {
    check_supercritical(rho)?;
    (0u64..1 << len)
        .map(|bits| {
            let sigma: Vec<u8> = (0..len).map(|i| (bits >> i & 1) as u8).collect();
            gcm_weight(&sigma, rho)
        })
        .collect()
}

/// Exact expectation of the gradient function under the supercritical
/// stationary measure; equals `(2ρ-1)/ρ` for every admissible `ρ`.
pub fn pi_h_exact(rho: &BigRational) -> Result<BigRational, MeasureError> {
    let mut total = BigRational::zero();
    for bits in 0u64..8 {
        let sigma = [(bits & 1) as u8, (bits >> 1 & 1) as u8, (bits >> 2 & 1) as u8];
        let h = sigma[0] * sigma[1] + sigma[1] * sigma[2] - sigma[0] * sigma[1] * sigma[2];
        if h == 1 {
            total += gcm_weight(&sigma, rho)?;
        }
    }
    Ok(total)
}

/// A function of finitely many coordinates: value table over the window
/// `{left, …, left + width - 1}`, indexed by occupancy bits.
#[derive(Clone, Debug)]
pub struct LocalFn {
    pub left: i64,
    values: Vec<BigRational>,
}

impl LocalFn {
    pub fn new(left: i64, values: Vec<BigRational>) -> Self {
        assert!(values.len().is_power_of_two() && values.len() >= 2);
        LocalFn { left, values }
    }

    /// `f(η) = η_site`.
    pub fn occupancy(site: i64) -> Self {
        LocalFn::new(site, vec![BigRational::zero(), BigRational::one()])
    }

    /// `f(η) = η_site η_{site+1}`.
    pub fn pair_product(site: i64) -> Self {
        let zero = BigRational::zero;
        LocalFn::new(site, vec![zero(), zero(), zero(), BigRational::one()])
    }

    /// Indicator of an exact occupancy pattern on `{left, …}`.
    pub fn pattern(left: i64, bits: &[u8]) -> Self {
        let width = bits.len();
        let target: u64 = bits.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum();
        let values = (0u64..1 << width)
            .map(|b| if b == target { BigRational::one() } else { BigRational::zero() })
            .collect();
        LocalFn::new(left, values)
    }

    pub fn width(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    #[inline]
    fn eval(&self, bits: u64) -> &BigRational {
        &self.values[bits as usize]
    }
}

/// Which window marginals weight the residual.
#[derive(Clone, Copy, Debug)]
enum Marginals {
    GrandCanonical,
    BernoulliProduct,
}

fn generator_residual(
    f: &LocalFn,
    rho: &BigRational,
    marginals: Marginals,
) -> Result<BigRational, MeasureError> {
    // The generator applied to f depends on f's support enlarged by two
    // sites on each side: swaps at edges touching the support, with rates
    // reading one more site at both ends.
    let fw = f.width();
    let width = fw + 4;
    assert!(width <= 24, "support too wide for exact enumeration");
    let bit = |b: u64, i: usize| (b >> i & 1) as u8;
    let one = BigRational::one();
    let bern_p = rho.clone();
    let bern_q = &one - rho;

    let mut residual = BigRational::zero();
    for b in 0u64..1 << width {
        let sigma: Vec<u8> = (0..width).map(|i| bit(b, i)).collect();
        let weight = match marginals {
            Marginals::GrandCanonical => gcm_weight(&sigma, rho)?,
            Marginals::BernoulliProduct => {
                let mut w = BigRational::one();
                for &s in &sigma {
                    w *= if s == 1 { &bern_p } else { &bern_q };
                }
                w
            }
        };
        if weight.is_zero() {
            continue;
        }
        // edges (x, x+1) with window-relative x in 1..=width-3
        let mut delta = BigRational::zero();
        for x in 1..=width - 3 {
            let c = sigma[x - 1] * sigma[x] * (1 - sigma[x + 1])
                + (1 - sigma[x]) * sigma[x + 1] * sigma[x + 2];
            if c == 0 {
                continue;
            }
            let swapped = b ^ (1 << x) ^ (1 << (x + 1));
            let fbits = |w: u64| (w >> 2) & ((1 << fw) - 1);
            delta += f.eval(fbits(swapped)) - f.eval(fbits(b));
        }
        residual += weight * delta;
    }
    Ok(residual)
}

/// Exact expectation of the generator applied to `f` under the
/// supercritical stationary measure; zero for every local `f`.
pub fn stationarity_residual(f: &LocalFn, rho: &BigRational) -> Result<BigRational, MeasureError> {
    generator_residual(f, rho, Marginals::GrandCanonical)
}

/// Negative control: the same residual with product Bernoulli(ρ) marginals
/// in place of the stationary ones. Nonzero for e.g. `f = η_0 η_1`.
pub fn bernoulli_residual(f: &LocalFn, rho: &BigRational) -> Result<BigRational, MeasureError> {
    generator_residual(f, rho, Marginals::BernoulliProduct)
}

/// Maximum detailed-balance defect of the product geometric measure with
/// mean `alpha ≥ 1` over all single-jump transitions of the zero-range
/// dynamics on `T_k`, counts truncated at `cap`. Exactly zero.
pub fn detailed_balance_residual(
    alpha: &BigRational,
    k: usize,
    cap: u32,
) -> Result<BigRational, MeasureError> {
    if *alpha < BigRational::one() {
        return Err(MeasureError::AlphaOutOfRange(f64_of(alpha)));
    }
    assert!(k >= 2 && cap >= 1);
    let one = BigRational::one();
    let inv_a = alpha.recip();
    let tail = &one - &inv_a; // 1 - 1/α
    let weight = |omega: &[u32]| -> BigRational {
        let mut w = BigRational::one();
        for &c in omega {
            w *= &inv_a;
            w *= rat_pow(&tail, c as i64 - 1);
        }
        w
    };

    let mut omega = vec![1u32; k];
    let mut max_defect = BigRational::zero();
    loop {
        let w = weight(&omega);
        for x in 0..k {
            if omega[x] < 2 {
                continue;
            }
            for dx in [1usize, k - 1] {
                let y = (x + dx) % k;
                if omega[y] + 1 > cap {
                    continue; // outside the truncation
                }
                let mut target = omega.clone();
                target[x] -= 1;
                target[y] += 1;
                // forward rate 1 (ω_x ≥ 2); reverse rate 1 (target has ≥ 2 at y)
                let defect = (&w - weight(&target)).abs();
                if defect > max_defect {
                    max_defect = defect;
                }
            }
        }
        // odometer over {1..=cap}^k
        let mut i = 0;
        loop {
            if i == k {
                return Ok(max_defect);
            }
            if omega[i] < cap {
                omega[i] += 1;
                break;
            }
            omega[i] = 1;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_weights_match_closed_forms() {
        // weight(1,1) = 2ρ-1, weight(1,0) = weight(0,1) = 1-ρ, weight(0,0) = 0
        for (num, den) in [(3i64, 4i64), (3, 5), (9, 10), (11, 20)] {
            let rho = big_ratio(num, den);
            let w11 = gcm_weight(&[1, 1], &rho).unwrap();
            let w10 = gcm_weight(&[1, 0], &rho).unwrap();
            let w01 = gcm_weight(&[0, 1], &rho).unwrap();
            let w00 = gcm_weight(&[0, 0], &rho).unwrap();
            assert_eq!(w11, &rho + &rho - BigRational::one());
            assert_eq!(w10, BigRational::one() - &rho);
            assert_eq!(w01, w10);
            assert!(w00.is_zero());
            assert!((w11 + w10 + w01 + w00).is_one());
        }
        // ρ = 3/4 plug-in: (0.5, 0.25, 0.25, 0)
        let rho = big_ratio(3, 4);
        assert_eq!(gcm_weight(&[1, 1], &rho).unwrap(), big_ratio(1, 2));
        assert_eq!(gcm_weight(&[1, 0], &rho).unwrap(), big_ratio(1, 4));
    }

    #[test]
    fn weights_need_supercritical_density() {
        assert!(gcm_weight(&[1, 0], &big_ratio(1, 2)).is_err());
        assert!(gcm_weight(&[1, 0], &big_ratio(1, 4)).is_err());
        assert!(gcm_weight(&[1, 0], &BigRational::one()).is_err());
    }

    #[test]
    fn normalization_exact() {
        // Σ_σ weight(σ) = 1 exactly for windows up to 11 sites.
        for (num, den) in [(11i64, 20i64), (3, 5), (3, 4), (9, 10), (99, 100)] {
            let rho = big_ratio(num, den);
            for len in 1..=11usize {
                let total: BigRational =
                    window_weights(len, &rho).unwrap().into_iter().sum();
                assert!(total.is_one(), "len {len} ρ {num}/{den}");
            }
        }
    }

    #[test]
    fn marginal_consistency_exact() {
        // Summing the last site of the (ℓ+1)-window reproduces the ℓ-window.
        let rho = big_ratio(3, 4);
        for len in 1..=9usize {
            let short = window_weights(len, &rho).unwrap();
            let long = window_weights(len + 1, &rho).unwrap();
            for bits in 0u64..1 << len {
                let merged = &long[bits as usize] + &long[(bits | 1 << len) as usize];
                assert_eq!(merged, short[bits as usize], "len {len} bits {bits:b}");
            }
        }
    }

    #[test]
    fn gradient_expectation_closed_form() {
        for (num, den) in [(3i64, 5i64), (3, 4), (9, 10), (2, 3)] {
            let rho = big_ratio(num, den);
            let expected = (&rho + &rho - BigRational::one()) / &rho;
            assert_eq!(pi_h_exact(&rho).unwrap(), expected);
        }
    }

    #[test]
    fn stationarity_zero_and_bernoulli_control() {
        let cases: Vec<(LocalFn, Vec<(i64, i64)>)> = vec![
            (LocalFn::occupancy(0), vec![(3, 4)]),
            (LocalFn::pair_product(0), vec![(3, 5), (9, 10)]),
            (LocalFn::pattern(-1, &[1, 0, 1]), vec![(3, 4)]),
        ];
        for (f, rhos) in cases {
            for (num, den) in rhos {
                let rho = big_ratio(num, den);
                let res = stationarity_residual(&f, &rho).unwrap();
                assert!(res.is_zero(), "residual {res} for ρ={num}/{den}");
            }
        }
        // The product measure is not stationary: nonzero for η_0 η_1.
        let control = bernoulli_residual(&LocalFn::pair_product(0), &big_ratio(3, 4)).unwrap();
        assert!(!control.is_zero());
    }

    #[test]
    fn detailed_balance_zero() {
        assert!(detailed_balance_residual(&big_ratio(2, 1), 2, 5).unwrap().is_zero());
        assert!(detailed_balance_residual(&big_ratio(3, 2), 3, 4).unwrap().is_zero());
        assert!(detailed_balance_residual(&big_ratio(1, 2), 2, 3).is_err());
    }
}
