//! Local functions of the exclusion dynamics: the edge jump rate, the
//! gradient function `h`, the instantaneous current and block densities.
//!
//! These are total functions of at most four consecutive occupancies; the
//! simulator calls them once per event, so they stay branch-light.

use crate::config::ExclusionConfig;

/// Jump rate of the edge `(x, x+1)`:
/// `c = η_{x-1} η_x (1-η_{x+1}) + (1-η_x) η_{x+1} η_{x+2}`.
///
/// A particle moves across the edge only when pushed by an occupied
/// neighbor on the other side; the two summands are mutually exclusive, so
/// the rate is 0 or 1.
#[inline]
pub fn jump_rate(eta: &ExclusionConfig, x: usize) -> u8 {
    debug_assert!(eta.size() >= 4);
    let xm1 = eta.occ(eta.pred(x));
    let x0 = eta.occ(x);
    let xp1 = eta.occ(eta.succ(x));
    let xp2 = eta.occ(eta.succ(eta.succ(x)));
    xm1 * x0 * (1 - xp1) + (1 - x0) * xp1 * xp2
}

/// Translated gradient function
/// `τ_x h = η_{x-1} η_x + η_x η_{x+1} - η_{x-1} η_x η_{x+1}`.
#[inline]
pub fn h_local(eta: &ExclusionConfig, x: usize) -> u8 {
    let a = eta.occ(eta.pred(x));
    let b = eta.occ(x);
    let c = eta.occ(eta.succ(x));
    a * b + b * c - a * b * c
}

/// Instantaneous current over the edge `(x, x+1)`: `j = τ_x h - τ_{x+1} h`.
#[inline]
pub fn current(eta: &ExclusionConfig, x: usize) -> i8 {
    h_local(eta, x) as i8 - h_local(eta, eta.succ(x)) as i8
}

/// Number of particles in the box `B_ℓ(x) = {x-ℓ, …, x+ℓ}`.
pub fn local_count(eta: &ExclusionConfig, x: usize, ell: usize) -> usize {
    let n = eta.size();
    assert!(2 * ell + 1 <= n, "block wider than the torus");
    let mut count = 0usize;
    let mut y = (x + n - ell) % n;
    for _ in 0..(2 * ell + 1) {
        count += eta.occ(y) as usize;
        y = eta.succ(y);
    }
    count
}

/// Block density `ρ^ℓ_x = (2ℓ+1)^{-1} Σ_{y∈B_ℓ(x)} η_y`.
pub fn local_density(eta: &ExclusionConfig, x: usize, ell: usize) -> f64 {
    local_count(eta, x, ell) as f64 / (2 * ell + 1) as f64
}
