//! The five canned experiments plus the occupancy-bound run. Each returns
//! a typed outcome with the pinned acceptance thresholds already applied;
//! the CLI and the acceptance suite share these runners.

use rayon::prelude::*;

use fep_core::analysis::{
    front_match_error, hitting_time_two_phased, one_block_statistic, typical_check,
    zero_position_diagnostics, MacroMap, TypicalityParams,
};
use fep_core::config::ExclusionConfig;
use fep_core::dynamics::{run_fep, run_fep_until, run_zero_range_monitored, SimParams};
use fep_core::mapping::{first_zero_at_or_after, to_zero_range};
use fep_core::measures::{sample_gcm_ring, sample_mu_n, ProfileSpec};
use fep_core::phase::{two_phased_decompose, Phases};
use fep_core::seeds::derive_seed;
use fep_core::stefan::{
    extract_interfaces, solve_weak, DensityField, InterfaceTrajectory, SolverParams,
};

/// Pinned acceptance thresholds.
pub mod thresholds {
    /// Mean block-density L¹ error at the largest size.
    pub const HYDRO_L1_MAX: f64 = 0.05;
    /// Fraction of replicas two-phased by `N^{-1/4}`.
    pub const HITTING_MIN_FRACTION: f64 = 0.9;
    /// Mean torus error of the rescaled fronts.
    pub const FRONT_MATCH_MAX: f64 = 0.05;
    /// Fraction of samples passing all typicality gates.
    pub const TYPICALITY_MIN_FRACTION: f64 = 0.9;
    /// Fraction of replicas whose occupancy stays below the cap.
    pub const OCCUPANCY_MIN_FRACTION: f64 = 0.95;
}

/// Block radius used to coarse-grain the empirical density.
pub fn block_radius(n: usize) -> usize {
    (n as f64).powf(0.75).floor() as usize
}

/// Weak solution of the free boundary problem from the profile, with the
/// interface trajectory extracted along the way.
pub fn pde_reference(
    profile: &ProfileSpec,
    m: usize,
    t: f64,
) -> (Vec<DensityField>, InterfaceTrajectory) {
    let times: Vec<f64> = (0..=10).map(|i| t * i as f64 / 10.0).collect();
    let rho0 = DensityField::from_profile(profile, m);
    let fields = solve_weak(&rho0, &SolverParams::new(m, t, times)).expect("CFL default");
    let traj = extract_interfaces(&fields, 1e-3).expect("reference profile has one arc");
    (fields, traj)
}

/// Circular block densities `ρ^ℓ_x` for all sites, via prefix sums.
pub fn block_densities(eta: &ExclusionConfig, ell: usize) -> Vec<f64> {
    let n = eta.size();
    let mut pref = vec![0u32; n + 1];
    for x in 0..n {
        pref[x + 1] = pref[x] + eta.occ(x) as u32;
    }
    let width = (2 * ell + 1) as f64;
    (0..n)
        .map(|x| {
            let lo = (x + n - ell) % n;
            let hi = lo + 2 * ell + 1;
            let sum = if hi <= n {
                pref[hi] - pref[lo]
            } else {
                pref[n] - pref[lo] + pref[hi - n]
            };
            sum as f64 / width
        })
        .collect()
}

/// `1/N Σ_x |ρ^ℓ_x - ρ_pde(x/N)|`.
pub fn block_density_l1(eta: &ExclusionConfig, ell: usize, pde: &DensityField) -> f64 {
    let n = eta.size();
    block_densities(eta, ell)
        .iter()
        .enumerate()
        .map(|(x, &r)| (r - pde.at(x as f64 / n as f64)).abs())
        .sum::<f64>()
        / n as f64
}

#[derive(Clone, Debug)]
pub struct HydroReplica {
    pub n: usize,
    pub seed: u64,
    pub l1: f64,
    /// Microscopic fronts at the observation time, if two-phased.
    pub fronts: Option<(usize, usize)>,
    pub events: u64,
}

/// Run one ensemble at size `n`: sample the initial law, run to time `t`,
/// and compare block densities against the PDE field at `t`.
pub fn hydro_ensemble(
    profile: &ProfileSpec,
    n: usize,
    replicas: usize,
    base_seed: u64,
    t: f64,
    pde_at_t: &DensityField,
) -> Vec<HydroReplica> {
    let ell = block_radius(n);
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(base_seed, r as u64);
            let eta0 = sample_mu_n(profile, n, seed).expect("profile validated");
            let traj =
                run_fep(eta0, &SimParams::new(t, vec![t], derive_seed(seed, 1))).expect("n >= 4");
            let (_, snap) = &traj.snapshots[0];
            let fronts = match two_phased_decompose(snap) {
                Some(Phases::TwoPhased(d)) => Some((d.front_left(), d.front_right())),
                _ => None,
            };
            HydroReplica {
                n,
                seed,
                l1: block_density_l1(snap, ell, pde_at_t),
                fronts,
                events: traj.event_count,
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct HydroOutcome {
    /// `(n, mean L¹, per-replica L¹)` per sweep size.
    pub rows: Vec<(usize, f64, Vec<f64>)>,
    pub monotone: bool,
    pub final_l1: f64,
    pub pass: bool,
}

pub fn run_hydro(
    profile: &ProfileSpec,
    sizes: &[(usize, usize)], // (n, replicas)
    m: usize,
    t: f64,
    base_seed: u64,
) -> HydroOutcome {
    let (fields, _) = pde_reference(profile, m, t);
    let pde_at_t = fields.last().expect("snapshots");
    let mut rows = Vec::new();
    for (i, &(n, replicas)) in sizes.iter().enumerate() {
        let ens = hydro_ensemble(profile, n, replicas, derive_seed(base_seed, i as u64), t, pde_at_t);
        let per: Vec<f64> = ens.iter().map(|r| r.l1).collect();
        let mean = per.iter().sum::<f64>() / per.len() as f64;
        rows.push((n, mean, per));
    }
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    let final_l1 = rows.last().map(|r| r.1).unwrap_or(f64::INFINITY);
    let pass = monotone && final_l1 <= thresholds::HYDRO_L1_MAX;
    HydroOutcome { rows, monotone, final_l1, pass }
}

#[derive(Clone, Debug)]
pub struct FrontsOutcome {
    pub mean_error: f64,
    pub undefined: usize,
    pub compared: usize,
    pub pass: bool,
}

/// Front match at a single observation time over an ensemble.
pub fn run_fronts(
    profile: &ProfileSpec,
    n: usize,
    replicas: usize,
    m: usize,
    t: f64,
    base_seed: u64,
) -> FrontsOutcome {
    let (_, macro_traj) = pde_reference(profile, m, t);
    let ens = {
        let (fields, _) = pde_reference(profile, m, t);
        let pde_at_t = fields.last().unwrap().clone();
        hydro_ensemble(profile, n, replicas, base_seed, t, &pde_at_t)
    };
    fronts_outcome_from_ensemble(&ens, n, t, &macro_traj)
}

/// Front comparison reusing an existing hydro ensemble.
pub fn fronts_outcome_from_ensemble(
    ensemble: &[HydroReplica],
    n: usize,
    t: f64,
    macro_traj: &InterfaceTrajectory,
) -> FrontsOutcome {
    let micro: Vec<(f64, Option<(usize, usize)>)> =
        ensemble.iter().map(|r| (t, r.fronts)).collect();
    let report = front_match_error(&micro, n, macro_traj);
    let pass = !report.errors.is_empty() && report.mean_error <= thresholds::FRONT_MATCH_MAX;
    FrontsOutcome {
        mean_error: report.mean_error,
        undefined: report.undefined,
        compared: report.errors.len(),
        pass,
    }
}

#[derive(Clone, Debug)]
pub struct HittingOutcome {
    pub t_n: f64,
    pub hits: usize,
    pub replicas: usize,
    pub fraction: f64,
    /// Wilson 95% interval for the hit fraction.
    pub wilson: (f64, f64),
    pub hit_times: Vec<Option<f64>>,
    pub pass: bool,
}

/// Fraction of replicas two-phased by `t_N = N^{-m}` (default exponent
/// 1/4), with dense checks and early stopping: the two-phased class is
/// absorbing, so the first success decides.
pub fn run_hitting(
    profile: &ProfileSpec,
    n: usize,
    replicas: usize,
    base_seed: u64,
    exponent: f64,
) -> HittingOutcome {
    let t_n = (n as f64).powf(-exponent);
    let checks: Vec<f64> = (1..=64).map(|j| t_n * j as f64 / 64.0).collect();
    let hit_times: Vec<Option<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(base_seed, r as u64);
            let eta0 = sample_mu_n(profile, n, seed).expect("profile validated");
            if two_phased_decompose(&eta0).is_some() {
                return Some(0.0);
            }
            let params = SimParams::new(t_n, checks.clone(), derive_seed(seed, 1));
            let (traj, stopped) =
                run_fep_until(eta0, &params, |_, snap| two_phased_decompose(snap).is_some())
                    .expect("n >= 4");
            stopped.or_else(|| hitting_time_two_phased(&traj.snapshots))
        })
        .collect();
    let hits = hit_times.iter().filter(|h| h.is_some()).count();
    let fraction = hits as f64 / replicas as f64;
    let wilson = wilson_interval(hits, replicas, 1.96);
    HittingOutcome {
        t_n,
        hits,
        replicas,
        fraction,
        wilson,
        hit_times,
        pass: fraction >= thresholds::HITTING_MIN_FRACTION,
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug)]
pub struct OneblockOutcome {
    /// `(ℓ, space-time averaged statistic)`.
    pub values: Vec<(usize, f64)>,
    pub strictly_decreasing: bool,
    pub pass: bool,
}

/// One-block statistic at supercritical equilibrium: start from the
/// stationary-measure sampler, run a short burn, average over snapshots.
pub fn run_oneblock(
    n: usize,
    rho: f64,
    blocks: &[usize],
    replicas: usize,
    base_seed: u64,
) -> OneblockOutcome {
    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(base_seed, r as u64);
            let eta0 = sample_gcm_ring(rho, n, seed).expect("supercritical");
            let horizon = 2e-3;
            let observe = vec![horizon / 2.0, horizon];
            let traj =
                run_fep(eta0, &SimParams::new(horizon, observe, derive_seed(seed, 1))).unwrap();
            blocks.iter().map(|&ell| one_block_statistic(&traj.snapshots, ell)).collect()
        })
        .collect();
    let values: Vec<(usize, f64)> = blocks
        .iter()
        .enumerate()
        .map(|(i, &ell)| {
            (ell, per_replica.iter().map(|v| v[i]).sum::<f64>() / replicas as f64)
        })
        .collect();
    let strictly_decreasing = values.windows(2).all(|w| w[1].1 < w[0].1);
    OneblockOutcome { values, strictly_decreasing, pass: strictly_decreasing }
}

#[derive(Clone, Debug)]
pub struct TypicalitySample {
    pub k0: usize,
    pub in_window: bool,
    pub deviation_ok: bool,
    pub max_deviation: f64,
    pub density_ok: bool,
    pub witness_ok: bool,
}

impl TypicalitySample {
    pub fn all_pass(&self) -> bool {
        self.in_window && self.deviation_ok && self.density_ok && self.witness_ok
    }
}

#[derive(Clone, Debug)]
pub struct TypicalityOutcome {
    pub samples: Vec<TypicalitySample>,
    pub fraction_all: f64,
    pub fraction_in_window: f64,
    pub fraction_deviation: f64,
    pub fraction_density: f64,
    pub fraction_witness: f64,
    pub pass: bool,
}

/// Measure-level experiment: no dynamics. Every sample is checked for the
/// zero-position law of large numbers and both typicality conditions.
pub fn run_typicality(
    profile: &ProfileSpec,
    n: usize,
    samples: usize,
    base_seed: u64,
) -> TypicalityOutcome {
    let map = MacroMap::new(profile.clone()).expect("profile below density 1");
    let geom = *map.geometry().expect("front geometry required");
    let rows: Vec<TypicalitySample> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(base_seed, r as u64);
            let eta = sample_mu_n(profile, n, seed).expect("profile validated");
            let report = zero_position_diagnostics(&eta, &map).expect("zeros exist a.s.");
            let mark = first_zero_at_or_after(&eta, 0).expect("zeros exist");
            let omega = to_zero_range(&eta, mark).expect("marked site empty");
            let (density_ok, witness_ok) = match TypicalityParams::new(report.k0, &geom) {
                Ok(params) => {
                    let check = typical_check(&omega, &params);
                    (check.density_ok, check.witness_ok)
                }
                Err(_) => (false, false),
            };
            TypicalitySample {
                k0: report.k0,
                in_window: report.in_window,
                deviation_ok: report.max_deviation <= report.bound,
                max_deviation: report.max_deviation,
                density_ok,
                witness_ok,
            }
        })
        .collect();
    let frac = |f: &dyn Fn(&TypicalitySample) -> bool| {
        rows.iter().filter(|s| f(s)).count() as f64 / rows.len() as f64
    };
    let fraction_all = frac(&|s| s.all_pass());
    let outcome = TypicalityOutcome {
        fraction_all,
        fraction_in_window: frac(&|s| s.in_window),
        fraction_deviation: frac(&|s| s.deviation_ok),
        fraction_density: frac(&|s| s.density_ok),
        fraction_witness: frac(&|s| s.witness_ok),
        samples: rows,
        pass: fraction_all >= thresholds::TYPICALITY_MIN_FRACTION,
    };
    outcome
}

#[derive(Clone, Debug)]
pub struct OccupancyOutcome {
    pub held: usize,
    pub replicas: usize,
    pub fraction: f64,
    pub pass: bool,
}

/// Occupancy-bound experiment: map the initial law to its gap
/// representation and run the (non-accelerated) zero-range process to
/// `T_K = K^{7/4}`, watching the running supremum against `ln²K`. This is
/// the image of the accelerated exclusion run up to `T_K N^{-2}`.
pub fn run_occupancy(
    profile: &ProfileSpec,
    n: usize,
    replicas: usize,
    base_seed: u64,
) -> OccupancyOutcome {
    let held_flags: Vec<bool> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(base_seed, r as u64);
            let eta = sample_mu_n(profile, n, seed).expect("profile validated");
            let mark = first_zero_at_or_after(&eta, 0).expect("zeros exist a.s.");
            let omega = to_zero_range(&eta, mark).expect("marked site empty");
            let k = omega.size() as f64;
            let t_k = k.powf(1.75);
            let cap = k.ln() * k.ln();
            let params = SimParams::new(t_k, vec![], derive_seed(seed, 1));
            let (_, record) = run_zero_range_monitored(omega, &params, cap).expect("k >= 2");
            record.held_until(t_k)
        })
        .collect();
    let held = held_flags.iter().filter(|&&h| h).count();
    let fraction = held as f64 / replicas as f64;
    OccupancyOutcome {
        held,
        replicas,
        fraction,
        pass: fraction >= thresholds::OCCUPANCY_MIN_FRACTION,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_densities_match_direct_sums() {
        let eta = ExclusionConfig::from_text("1101001010110100").unwrap();
        let via_prefix = block_densities(&eta, 3);
        for (x, &v) in via_prefix.iter().enumerate() {
            assert!((v - fep_core::local::local_density(&eta, x, 3)).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn wilson_interval_sane() {
        let (lo, hi) = wilson_interval(45, 50, 1.96);
        assert!(lo > 0.78 && hi < 0.97 && lo < 0.9 && hi > 0.9);
        let (lo, _) = wilson_interval(0, 50, 1.96);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn small_scale_hitting_runs() {
        let out = run_hitting(&ProfileSpec::reference(), 128, 10, 7, 0.25);
        assert_eq!(out.replicas, 10);
        assert!(out.fraction >= 0.0 && out.fraction <= 1.0);
        assert!(out.t_n > 0.0);
    }

    #[test]
    fn small_scale_oneblock_runs() {
        let out = run_oneblock(512, 0.75, &[4, 8], 1, 11);
        assert_eq!(out.values.len(), 2);
        assert!(out.values.iter().all(|(_, v)| *v >= 0.0));
    }
}
