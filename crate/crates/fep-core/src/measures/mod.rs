//! Invariant measures of the exclusion and zero-range dynamics.
//!
//! Supercritical densities have a unique non-product stationary measure
//! with explicit window weights ([`gcm_weight`]); subcritically the
//! invariant measures are mixtures of Dirac masses on blocked
//! configurations. The zero-range image is reversible for product
//! geometric measures. Exact arithmetic (rationals over big integers)
//! backs the weight formula, the stationarity residual and the detailed
//! balance residual, so the corresponding checks are identities rather
//! than approximations.

mod gcm;
mod profile;
mod samplers;

pub use gcm::{
    bernoulli_residual, big_ratio, detailed_balance_residual, gcm_weight, gcm_weight_f64,
    is_ergodic_pattern, pi_h_exact, stationarity_residual, window_weights, LocalFn,
};
pub use num_rational::BigRational;
pub use profile::{FrontGeometry, ProfileError, ProfileSpec};
pub use samplers::{sample_gcm, sample_gcm_ring, sample_mu_n, sample_nu_alpha, sample_subcritical};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("density profile value {value} at u={u} outside [0,1]")]
    ProfileOutOfRange { u: f64, value: f64 },
    #[error("density {0} outside the supercritical range (1/2, 1)")]
    SupercriticalDensityRequired(f64),
    #[error("density {0} outside the subcritical range [0, 1/2]")]
    SubcriticalDensityRequired(f64),
    #[error("alternating configurations need an even torus, got {0}")]
    OddTorus(usize),
    #[error("zero-range density {0} must be at least 1")]
    AlphaOutOfRange(f64),
    #[error("argument {0} outside [0, 1]")]
    ArgOutOfRange(f64),
}

/// Flux function: `0` for `r ≤ 1/2`, `(2r-1)/r` above.
///
/// Continuous, non-decreasing and Lipschitz with constant 4 on (1/2, 1];
/// equals the expectation of the gradient function under the stationary
/// measure at density `r`.
pub fn script_h(r: f64) -> Result<f64, MeasureError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(MeasureError::ArgOutOfRange(r));
    }
    Ok(if r <= 0.5 { 0.0 } else { (2.0 * r - 1.0) / r })
}
