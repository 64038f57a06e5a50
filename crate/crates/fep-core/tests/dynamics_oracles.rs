//! Distributional oracles for the event-driven engines: exponential
//! holding times, absorption of the ergodic and two-phased classes, and
//! the commutation of the dynamics with the gap mapping.

use fep_core::config::ZeroRangeConfig;
use fep_core::dynamics::{run_fep, run_fep_marked, SimParams, ZrSim};
use fep_core::mapping::{from_zero_range, to_zero_range};
use fep_core::measures::{sample_gcm_ring, sample_mu_n, ProfileSpec};
use fep_core::phase::{classify, two_phased_decompose, Classification};

#[test]
fn holding_times_are_exponential() {
    // Two active sites, total rate 4; Kolmogorov-Smirnov at the 1% level.
    let n = 3000usize;
    let mut times: Vec<f64> = (0..n)
        .map(|seed| {
            let omega = ZeroRangeConfig::from_counts(vec![3, 0, 3, 0]).unwrap();
            let mut sim = ZrSim::new(omega, seed as u64).unwrap();
            assert!(sim.step(f64::INFINITY.min(1e9)));
            sim.time()
        })
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rate = 4.0;
    let mut d = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let cdf = 1.0 - (-rate * t).exp();
        let hi = (i + 1) as f64 / n as f64 - cdf;
        let lo = cdf - i as f64 / n as f64;
        d = d.max(hi).max(lo);
    }
    let critical = 1.628 / (n as f64).sqrt(); // 1% two-sided
    assert!(d < critical, "KS statistic {d} exceeds {critical}");
}

#[test]
fn ergodic_class_is_absorbing() {
    // No pair of adjacent empty sites is ever created inside an ergodic ring.
    for seed in 0..300u64 {
        let eta0 = sample_gcm_ring(0.7, 48, seed).unwrap();
        let traj = run_fep(eta0, &SimParams::new(0.3, vec![0.1, 0.2, 0.3], seed ^ 0xabc)).unwrap();
        for (t, snap) in &traj.snapshots {
            assert_eq!(classify(snap), Classification::Ergodic, "seed {seed} t {t}");
        }
    }
}

#[test]
fn two_phased_class_is_absorbing() {
    // Once a split exists it persists (possibly collapsing to ergodic).
    let profile = ProfileSpec::reference();
    for seed in 0..200u64 {
        let eta0 = sample_mu_n(&profile, 64, seed).unwrap();
        let observe: Vec<f64> = (1..=30).map(|i| 0.4 * i as f64 / 30.0).collect();
        let traj = run_fep(eta0, &SimParams::new(0.4, observe, seed ^ 0x517)).unwrap();
        let mut seen_split = false;
        for (t, snap) in &traj.snapshots {
            let split = two_phased_decompose(snap).is_some();
            if seen_split {
                assert!(split, "two-phased property lost at t={t} seed={seed}");
            }
            seen_split |= split;
        }
    }
}

#[test]
fn mapped_dynamics_matches_zero_range_process() {
    // Pattern frequencies of the mapped configuration (seen from the
    // tracked empty site) at macroscopic time t match the zero-range
    // process run for microscopic time N² t, within 3 MC standard errors.
    let omega0 = ZeroRangeConfig::from_counts(vec![2, 1, 1, 2, 1, 2, 1, 2]).unwrap();
    let eta0 = from_zero_range(&omega0);
    let n = eta0.size();
    let micro_t = 5.0;
    let macro_t = micro_t / (n * n) as f64;
    let replicas = 10_000u64;

    // indicator statistics of the mapped configuration
    let stats = |omega: &ZeroRangeConfig| {
        [
            (omega.get(0) >= 2) as u32 as f64,
            (omega.get(0) == 1) as u32 as f64,
            (omega.get(0) >= 1 && omega.get(1) >= 2) as u32 as f64,
        ]
    };

    let mut fep_acc = [0.0f64; 3];
    for seed in 0..replicas {
        let (traj, marks) =
            run_fep_marked(eta0.clone(), 0, &SimParams::new(macro_t, vec![macro_t], seed)).unwrap();
        let (_, snap) = &traj.snapshots[0];
        let (_, mark) = marks[0];
        let omega = to_zero_range(snap, mark).unwrap();
        for (acc, v) in fep_acc.iter_mut().zip(stats(&omega)) {
            *acc += v;
        }
    }

    let mut zr_acc = [0.0f64; 3];
    for seed in 0..replicas {
        let mut sim = ZrSim::new(omega0.clone(), seed ^ 0x9e37).unwrap();
        sim.advance_to(micro_t);
        for (acc, v) in zr_acc.iter_mut().zip(stats(&sim.state())) {
            *acc += v;
        }
    }

    for i in 0..3 {
        let a = fep_acc[i] / replicas as f64;
        let b = zr_acc[i] / replicas as f64;
        // binomial spread for both estimators
        let var = (a * (1.0 - a)).max(1.0 / replicas as f64) / replicas as f64;
        let se = (2.0 * var).sqrt();
        assert!(
            (a - b).abs() <= 3.0 * se + 1e-9,
            "statistic {i}: mapped {a} vs zero-range {b} (se {se})"
        );
    }
}
