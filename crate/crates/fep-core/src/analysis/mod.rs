//! Observables computed from configurations and trajectories: empirical
//! pairings, Young histograms, the one-block statistic, front matching
//! against the PDE interfaces, zero-position diagnostics and the
//! typicality check for zero-range configurations.

mod macro_map;
mod typical;

pub use macro_map::{zero_position_diagnostics, MacroMap, ZeroPositionReport};
pub use typical::{typical_check, TypicalityParams, TypicalityReport};

use thiserror::Error;

use crate::config::ExclusionConfig;
use crate::local::{h_local, local_count};
use crate::phase::{two_phased_decompose, Phases};
use crate::stefan::{flux, InterfaceTrajectory};
use crate::torus::torus_distance;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("configuration has no empty site")]
    NoEmptySite,
    #[error("profile reaches density 1; the zero-position map is not invertible")]
    ProfileReachesOne,
    #[error("profile lacks the two-critical-point front geometry: {0}")]
    NoFrontGeometry(String),
    #[error("torus size {0} too small for the typicality scales")]
    KTooSmall(usize),
}

/// `(1/N) Σ_x φ(x/N) η_x`.
pub fn empirical_pairing(eta: &ExclusionConfig, phi: impl Fn(f64) -> f64) -> f64 {
    let n = eta.size();
    (0..n).map(|x| if eta.get(x) { phi(x as f64 / n as f64) } else { 0.0 }).sum::<f64>() / n as f64
}

/// Binned joint distribution of position and block density: mass `1/N` at
/// `(x/N, ρ^ℓ_x)` for every site.
#[derive(Clone, Debug)]
pub struct YoungHistogram {
    pub u_bins: usize,
    pub r_bins: usize,
    /// Row-major `[u_bin][r_bin]` masses.
    pub mass: Vec<f64>,
    pub total: f64,
    sum_r: f64,
    count: usize,
}

impl YoungHistogram {
    pub fn build(eta: &ExclusionConfig, ell: usize, u_bins: usize, r_bins: usize) -> Self {
        assert!(u_bins > 0 && r_bins > 0);
        let n = eta.size();
        let mut hist = YoungHistogram {
            u_bins,
            r_bins,
            mass: vec![0.0; u_bins * r_bins],
            total: 0.0,
            sum_r: 0.0,
            count: 0,
        };
        let weight = 1.0 / n as f64;
        for x in 0..n {
            let r = local_count(eta, x, ell) as f64 / (2 * ell + 1) as f64;
            let ub = ((x as f64 / n as f64) * u_bins as f64) as usize % u_bins;
            let rb = ((r * r_bins as f64) as usize).min(r_bins - 1);
            hist.mass[ub * r_bins + rb] += weight;
            hist.total += weight;
            hist.sum_r += r;
            hist.count += 1;
        }
        hist
    }

    /// Exact mean of the deposited block densities; equals the global
    /// density (every site enters 2ℓ+1 blocks on the torus).
    pub fn r_marginal_mean(&self) -> f64 {
        self.sum_r / self.count as f64
    }

    /// Variance of the deposited block densities.
    pub fn r_marginal_variance(&self, eta: &ExclusionConfig, ell: usize) -> f64 {
        let n = eta.size();
        let mean = self.r_marginal_mean();
        (0..n)
            .map(|x| {
                let r = local_count(eta, x, ell) as f64 / (2 * ell + 1) as f64;
                (r - mean) * (r - mean)
            })
            .sum::<f64>()
            / n as f64
    }
}

/// Space-time average over snapshots and sites of
/// `|avg_{B_ℓ(x)} τ_y h - H(ρ^ℓ_x)|`.
pub fn one_block_statistic(snapshots: &[(f64, ExclusionConfig)], ell: usize) -> f64 {
    assert!(snapshots.len() >= 2, "need at least two snapshots for a space-time average");
    let mut total = 0.0;
    let mut terms = 0usize;
    for (_, eta) in snapshots {
        let n = eta.size();
        assert!(2 * ell + 1 <= n);
        // circular prefix sums of occupancy and of τ_y h
        let mut occ = vec![0u32; n + 1];
        let mut hh = vec![0u32; n + 1];
        for y in 0..n {
            occ[y + 1] = occ[y] + eta.occ(y) as u32;
            hh[y + 1] = hh[y] + h_local(eta, y) as u32;
        }
        let block = (2 * ell + 1) as f64;
        let range = |pref: &[u32], lo: usize, len: usize| -> u32 {
            // circular sum over sites lo..lo+len-1
            let hi = lo + len;
            if hi <= n {
                pref[hi] - pref[lo]
            } else {
                pref[n] - pref[lo] + pref[hi - n]
            }
        };
        for x in 0..n {
            let lo = (x + n - ell) % n;
            let hbar = range(&hh, lo, 2 * ell + 1) as f64 / block;
            let rbar = range(&occ, lo, 2 * ell + 1) as f64 / block;
            total += (hbar - flux(rbar)).abs();
            terms += 1;
        }
    }
    total / terms as f64
}

/// First observation time at which the configuration is two-phased (the
/// fully ergodic case counts); `None` when it never happens.
pub fn hitting_time_two_phased(snapshots: &[(f64, ExclusionConfig)]) -> Option<f64> {
    snapshots.iter().find(|(_, eta)| two_phased_decompose(eta).is_some()).map(|(t, _)| *t)
}

/// Per-time torus errors between rescaled microscopic fronts and the
/// macroscopic interfaces.
#[derive(Clone, Debug, Default)]
pub struct FrontMatchReport {
    /// `(time, |u^N_-/N - u_-|, |u^N_+/N - u_+|)`.
    pub errors: Vec<(f64, f64, f64)>,
    /// Observations with undefined microscopic fronts, excluded above.
    pub undefined: usize,
    pub mean_error: f64,
}

/// Compare microscopic fronts (or `None` when not yet two-phased) against
/// the macroscopic interface trajectory; torus metric, so errors are at
/// most 1/2.
pub fn front_match_error(
    micro: &[(f64, Option<(usize, usize)>)],
    n: usize,
    macro_traj: &InterfaceTrajectory,
) -> FrontMatchReport {
    let mut report = FrontMatchReport::default();
    let mut sum = 0.0;
    for &(t, fronts) in micro {
        match (fronts, macro_traj.at(t)) {
            (Some((um, up)), Some(state)) => {
                let em = torus_distance(um as f64 / n as f64, state.u_minus);
                let ep = torus_distance(up as f64 / n as f64, state.u_plus);
                report.errors.push((t, em, ep));
                sum += em + ep;
            }
            _ => report.undefined += 1,
        }
    }
    if !report.errors.is_empty() {
        report.mean_error = sum / (2 * report.errors.len()) as f64;
    }
    report
}

/// Convenience: decompositions along a snapshot history.
pub fn decompose_history(snapshots: &[(f64, ExclusionConfig)]) -> Vec<Option<Phases>> {
    snapshots.iter().map(|(_, eta)| two_phased_decompose(eta)).collect()
}
