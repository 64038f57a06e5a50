//! Macroscopic mapping between exclusion and zero-range coordinates:
//! `v(u) = ∫_0^u (1-ρ)`, its inverse, the expected zero positions
//! `u_k = v^{-1}(k/N)` and the zero-position diagnostics.

use crate::analysis::AnalysisError;
use crate::config::ExclusionConfig;
use crate::measures::{FrontGeometry, ProfileSpec};

/// Cached mapping data for one profile.
#[derive(Clone, Debug)]
pub struct MacroMap {
    profile: ProfileSpec,
    /// `v(1) = ∫ (1-ρ) > 0`.
    pub v_bar: f64,
    /// Present when the profile has the two-critical-point geometry.
    pub geometry: Option<FrontGeometry>,
    grid: Vec<f64>,
}

const GRID: usize = 4096;

impl MacroMap {
    /// Requires `sup ρ < 1` so `v` is strictly increasing.
    pub fn new(profile: ProfileSpec) -> Result<Self, AnalysisError> {
        let mut grid = Vec::with_capacity(GRID + 1);
        for i in 0..=GRID {
            let u = i as f64 / GRID as f64;
            grid.push(u - profile.integral(0.0, u));
        }
        let strictly_increasing = grid.windows(2).all(|w| w[1] > w[0]);
        if !strictly_increasing {
            return Err(AnalysisError::ProfileReachesOne);
        }
        let geometry = profile.front_geometry().ok();
        Ok(MacroMap { v_bar: grid[GRID], profile, geometry, grid })
    }

    pub fn geometry(&self) -> Result<&FrontGeometry, AnalysisError> {
        self.geometry
            .as_ref()
            .ok_or_else(|| AnalysisError::NoFrontGeometry("two-critical-point layout required".into()))
    }

    pub fn v(&self, u: f64) -> f64 {
        u - self.profile.integral(0.0, u)
    }

    /// Monotone bisection with the cached grid as bracket; absolute
    /// tolerance `1e-12` in `u`.
    pub fn v_inv(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        if w >= self.v_bar {
            return 1.0;
        }
        let i = self.grid.partition_point(|&g| g < w);
        let (mut lo, mut hi) = (((i - 1) as f64) / GRID as f64, i as f64 / GRID as f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if self.v(mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Expected position (in macroscopic coordinates) of the k-th empty
    /// site on the torus of size `n`; clamped to 1 beyond `v̄ n`.
    pub fn u_k(&self, k: usize, n: usize) -> f64 {
        let w = k as f64 / n as f64;
        if w > self.v_bar {
            1.0
        } else {
            self.v_inv(w)
        }
    }

    /// Zero-range density profile in the mapped coordinate:
    /// `α(v) = ρ/(1-ρ) ∘ v^{-1}`.
    pub fn alpha_ini(&self, v: f64) -> f64 {
        let rho = self.profile.eval(self.v_inv(v));
        rho / (1.0 - rho)
    }
}

/// Zero-position law-of-large-numbers diagnostics for one sample.
#[derive(Clone, Copy, Debug)]
pub struct ZeroPositionReport {
    /// Number of empty sites.
    pub k0: usize,
    /// `|K_0 - v̄N| ≤ ln²N`.
    pub in_window: bool,
    /// `max_k |y_k - N u_k|` over `k = 1..K_0`.
    pub max_deviation: f64,
    /// The `ln²N` bound both checks use.
    pub bound: f64,
}

/// Compare every zero position against its expected location `N u_k`.
pub fn zero_position_diagnostics(
    eta0: &ExclusionConfig,
    map: &MacroMap,
) -> Result<ZeroPositionReport, AnalysisError> {
    let zeros = eta0.zero_positions();
    if zeros.is_empty() {
        return Err(AnalysisError::NoEmptySite);
    }
    let n = eta0.size();
    let nf = n as f64;
    let bound = nf.ln() * nf.ln();
    let k0 = zeros.len();
    let in_window = (k0 as f64 - map.v_bar * nf).abs() <= bound;
    let mut max_deviation = 0.0f64;
    for (idx, &y) in zeros.iter().enumerate() {
        let k = idx + 1;
        let expected = nf * map.u_k(k, n);
        max_deviation = max_deviation.max((y as f64 - expected).abs());
    }
    Ok(ZeroPositionReport { k0, in_window, max_deviation, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn flat_half_profile_closed_form() {
        // ρ ≡ 1/2: v(u) = u/2, u_k = 2k/N.
        let map = MacroMap::new(ProfileSpec::Constant { value: 0.5 }).unwrap();
        assert_abs_diff_eq!(map.v_bar, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(map.v_inv(0.25), 0.5, epsilon = 1e-9);
        let n = 1000;
        assert_abs_diff_eq!(map.u_k(100, n), 0.2, epsilon = 1e-9);

        let mut eta = ExclusionConfig::empty(n);
        for x in 0..n {
            eta.set(x, x % 2 == 0); // zeros at odd sites: y_k = 2k-1
        }
        let report = zero_position_diagnostics(&eta, &map).unwrap();
        assert_eq!(report.k0, 500);
        assert!(report.in_window);
        assert!(report.max_deviation <= 2.0, "max dev {}", report.max_deviation);
    }

    #[test]
    fn constructed_zeros_have_unit_deviation() {
        let map = MacroMap::new(ProfileSpec::reference()).unwrap();
        let n = 2048usize;
        let k0 = (map.v_bar * n as f64).round() as usize;
        let mut eta = ExclusionConfig::filled(n);
        for k in 1..=k0 {
            let pos = (n as f64 * map.u_k(k, n)).floor() as usize;
            eta.set(pos.min(n - 1), false);
        }
        let report = zero_position_diagnostics(&eta, &map).unwrap();
        assert!(report.max_deviation <= 1.0 + 1e-9, "max dev {}", report.max_deviation);
    }

    #[test]
    fn full_profile_is_rejected() {
        assert!(matches!(
            MacroMap::new(ProfileSpec::Constant { value: 1.0 }),
            Err(AnalysisError::ProfileReachesOne)
        ));
    }

    #[test]
    fn alpha_profile_matches_density_transform() {
        let map = MacroMap::new(ProfileSpec::reference()).unwrap();
        // at u = 3/4 the density is 3/4, so α = 3 at v(3/4)
        let v = map.v(0.75);
        assert_abs_diff_eq!(map.alpha_ini(v), 3.0, epsilon = 1e-6);
    }

    #[test]
    fn diagnostics_require_an_empty_site() {
        let map = MacroMap::new(ProfileSpec::Constant { value: 0.5 }).unwrap();
        let eta = ExclusionConfig::filled(16);
        assert!(matches!(zero_position_diagnostics(&eta, &map), Err(AnalysisError::NoEmptySite)));
    }
}
