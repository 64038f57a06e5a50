//! Bijection between exclusion and zero-range configurations.
//!
//! Reading clockwise from a marked empty site, the k-th zero-range count is
//! the number of particles strictly between the k-th and (k+1)-th empty
//! site. The inverse places the marked empty site at exclusion site 0.

use thiserror::Error;

use crate::config::{ExclusionConfig, ZeroRangeConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("marked site {0} is occupied")]
    MarkedSiteOccupied(usize),
    #[error("configuration has no empty site")]
    NoEmptySite,
}

/// Map an exclusion configuration to its gap representation.
pub fn to_zero_range(eta: &ExclusionConfig, marked_zero: usize) -> Result<ZeroRangeConfig, MappingError> {
    let n = eta.size();
    if eta.get(marked_zero) {
        return Err(MappingError::MarkedSiteOccupied(marked_zero));
    }
    let mut counts = Vec::new();
    let mut gap = 0u32;
    let mut x = eta.succ(marked_zero);
    for _ in 0..n - 1 {
        if eta.get(x) {
            gap += 1;
        } else {
            counts.push(gap);
            gap = 0;
        }
        x = eta.succ(x);
    }
    counts.push(gap); // wrap gap back to the marked zero
    debug_assert_eq!(counts.iter().map(|&c| c as usize).sum::<usize>() + counts.len(), n);
    Ok(ZeroRangeConfig::from_counts(counts).expect("at least the marked zero"))
}

/// Inverse mapping; the marked empty site lands at exclusion site 0 and the
/// output size is `K + Σ ω_k`.
pub fn from_zero_range(omega: &ZeroRangeConfig) -> ExclusionConfig {
    let n = omega.size() + omega.total_mass() as usize;
    let mut eta = ExclusionConfig::empty(n);
    let mut x = 0usize;
    for k in 0..omega.size() {
        // empty site, then ω_k particles
        x += 1;
        for _ in 0..omega.get(k) {
            eta.set(x, true);
            x += 1;
        }
    }
    debug_assert_eq!(x, n);
    eta
}

/// First empty site at or clockwise after `site`, if any.
pub fn first_zero_at_or_after(eta: &ExclusionConfig, site: usize) -> Option<usize> {
    let n = eta.size();
    let mut x = site;
    for _ in 0..n {
        if !eta.get(x) {
            return Some(x);
        }
        x = eta.succ(x);
    }
    None
}
