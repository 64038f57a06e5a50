//! Self-check suites: exact identities of the measures module and
//! property runs of the dynamics, printed one pass/fail line each.

use fep_core::config::{ExclusionConfig, ZeroRangeConfig};
use fep_core::dynamics::{run_coupled_zero_range, run_fep, SimParams};
use fep_core::local::{current, jump_rate};
use fep_core::measures::{
    bernoulli_residual, big_ratio, detailed_balance_residual, gcm_weight, pi_h_exact,
    sample_gcm, sample_gcm_ring, stationarity_residual, BigRational, LocalFn,
};
use fep_core::phase::{classify, Classification};
use fep_core::seeds::derive_seed;
use num_traits::{One, Zero};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.to_string(), pass, detail }
}

/// Exact-arithmetic identities.
pub fn exact_suite() -> Vec<Check> {
    let mut out = Vec::new();

    // stationarity residuals vanish; Bernoulli control does not
    let functions: Vec<(&str, LocalFn)> = vec![
        ("occupancy", LocalFn::occupancy(0)),
        ("pair", LocalFn::pair_product(0)),
        ("pattern-101", LocalFn::pattern(-1, &[1, 0, 1])),
    ];
    for (fname, f) in &functions {
        for (num, den) in [(3i64, 5i64), (3, 4), (9, 10)] {
            let rho = big_ratio(num, den);
            let res = stationarity_residual(f, &rho).expect("supercritical");
            out.push(check(
                &format!("stationarity[{fname}, ρ={num}/{den}]"),
                res.is_zero(),
                format!("residual = {res}"),
            ));
        }
    }
    let control = bernoulli_residual(&LocalFn::pair_product(0), &big_ratio(3, 4)).unwrap();
    out.push(check(
        "stationarity negative control (Bernoulli)",
        !control.is_zero(),
        format!("residual = {control}"),
    ));

    // detailed balance of the geometric measures
    for (alpha, k, cap) in [(big_ratio(3, 2), 3usize, 5u32), (big_ratio(2, 1), 2, 5), (big_ratio(3, 2), 3, 4)] {
        let res = detailed_balance_residual(&alpha, k, cap).unwrap();
        out.push(check(
            &format!("detailed-balance[α={alpha}, K={k}, cap={cap}]"),
            res.is_zero(),
            format!("max defect = {res}"),
        ));
    }

    // gradient expectation equals the flux symbolically
    for (num, den) in [(3i64, 5i64), (3, 4), (9, 10)] {
        let rho = big_ratio(num, den);
        let expected = (&rho + &rho - BigRational::one()) / &rho;
        let got = pi_h_exact(&rho).unwrap();
        out.push(check(
            &format!("flux-identity[ρ={num}/{den}]"),
            got == expected,
            format!("π(h) = {got}"),
        ));
    }

    // window normalization
    let rho = big_ratio(3, 4);
    let mut ok = true;
    for len in 1..=10usize {
        let total: BigRational = (0u64..1 << len)
            .map(|bits| {
                let sigma: Vec<u8> = (0..len).map(|i| (bits >> i & 1) as u8).collect();
                gcm_weight(&sigma, &rho).unwrap()
            })
            .sum();
        ok &= total.is_one();
    }
    out.push(check("window-normalization[ℓ≤10]", ok, String::new()));

    // local pattern table against jump semantics
    let mut ok = true;
    for bits in 0u32..16 {
        let v: Vec<bool> = (0..4).map(|x| bits >> x & 1 == 1).collect();
        let eta = ExclusionConfig::from_bools(&v).unwrap();
        for x in 0..4 {
            let xm1 = eta.get(eta.pred(x));
            let x0 = eta.get(x);
            let xp1 = eta.get(eta.succ(x));
            let xp2 = eta.get(eta.succ(eta.succ(x)));
            let expected = ((x0 && !xp1 && xm1) || (xp1 && !x0 && xp2)) as u8;
            ok &= jump_rate(&eta, x) == expected;
        }
    }
    out.push(check("rate-table[16 patterns]", ok, String::new()));

    // gradient identity, exhaustive through N = 12
    let mut ok = true;
    'outer: for n in 4..=12usize {
        for bits in 0u32..1 << n {
            let v: Vec<bool> = (0..n).map(|x| bits >> x & 1 == 1).collect();
            let eta = ExclusionConfig::from_bools(&v).unwrap();
            for x in 0..n {
                let mut lhs = 0i32;
                for y in 0..n {
                    if jump_rate(&eta, y) == 1 {
                        let mut swapped = eta.clone();
                        swapped.swap(y, eta.succ(y));
                        lhs += swapped.occ(x) as i32 - eta.occ(x) as i32;
                    }
                }
                let rhs = current(&eta, eta.pred(x)) as i32 - current(&eta, x) as i32;
                if lhs != rhs {
                    ok = false;
                    break 'outer;
                }
            }
        }
    }
    out.push(check("gradient-identity[N≤12]", ok, String::new()));

    out
}

/// Seeded property runs.
pub fn property_suite() -> Vec<Check> {
    let mut out = Vec::new();

    // monotone coupling over 10³ seeded pairs at K = 64
    let mut violations = 0usize;
    for seed in 0..1000u64 {
        let low = fep_core::measures::sample_nu_alpha(1.3, 64, derive_seed(seed, 0)).unwrap();
        let extra = fep_core::measures::sample_nu_alpha(1.2, 64, derive_seed(seed, 1)).unwrap();
        let high = ZeroRangeConfig::from_counts(
            low.counts().iter().zip(extra.counts()).map(|(a, b)| a + (b - 1)).collect(),
        )
        .unwrap();
        let params = SimParams::new(20.0, vec![5.0, 20.0], derive_seed(seed, 2));
        let traj = run_coupled_zero_range(low, high, &params).unwrap();
        if !traj.ordered_throughout() {
            violations += 1;
        }
    }
    out.push(check(
        "monotone-coupling[10³ pairs, K=64]",
        violations == 0,
        format!("{violations} ordering violations"),
    ));

    // ergodicity absorbing over seeded runs
    let mut violations = 0usize;
    for seed in 0..200u64 {
        let eta0 = sample_gcm_ring(0.7, 64, seed).unwrap();
        let traj =
            run_fep(eta0, &SimParams::new(0.3, vec![0.1, 0.3], derive_seed(seed, 3))).unwrap();
        for (_, snap) in &traj.snapshots {
            if classify(snap) != Classification::Ergodic {
                violations += 1;
            }
        }
    }
    out.push(check(
        "ergodic-absorbing[200 runs, N=64]",
        violations == 0,
        format!("{violations} violations"),
    ));

    // sampler window check against the exact pair weight at ρ = 3/4
    let mut hits = 0u64;
    let trials = 100_000u64;
    for seed in 0..trials {
        let eta = sample_gcm(0.75, 2, seed).unwrap();
        if eta.get(0) && eta.get(1) {
            hits += 1;
        }
    }
    let frac = hits as f64 / trials as f64;
    let se = (0.25f64 / trials as f64).sqrt();
    out.push(check(
        "sampler-pair-weight[ρ=3/4]",
        (frac - 0.5).abs() < 4.0 * se,
        format!("P(11) = {frac:.5}"),
    ));

    out
}

pub fn run_suite(which: &str) -> (Vec<Check>, bool) {
    let checks = match which {
        "exact" => exact_suite(),
        "property" => property_suite(),
        _ => {
            let mut all = exact_suite();
            all.extend(property_suite());
            all
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    (checks, pass)
}
