use fep_core::analysis::{zero_position_diagnostics, MacroMap, TypicalityParams};
use fep_core::config::ZeroRangeConfig;
use fep_core::mapping::{first_zero_at_or_after, to_zero_range};
use fep_core::measures::{sample_mu_n, ProfileSpec};

// duplicate of the witness internals for diagnosis
fn witness_diag(omega: &ZeroRangeConfig, p: &TypicalityParams, x: usize) -> (bool, bool, i64, u64) {
    let k = p.k;
    let span = p.window + k;
    let counts = omega.counts();
    let len = span + k + 1;
    let mut s = vec![0i64; len];
    let mut w = vec![0i64; len];
    for i in 0..len - 1 {
        let c = counts[i % k] as i64;
        s[i + 1] = s[i] + c;
        w[i + 1] = w[i] + c * i as i64;
    }
    let lo = x + 1;
    let hi = lo + p.window;
    let total = (s[hi] - s[lo]) as u64;
    if total < p.n_hat {
        return (false, false, 0, total);
    }
    let need = s[lo] + p.n_hat as i64;
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = (a + b) / 2;
        if s[mid + 1] >= need { b = mid; } else { a = mid + 1; }
    }
    let j_hat = a;
    let cum = s[j_hat + 1] - s[lo];
    let excess = cum - p.n_hat as i64;
    let raw = (w[j_hat + 1] - w[lo]) - x as i64 * cum;
    let moment = raw - excess * (j_hat - x) as i64 - 5 * p.ell as i64 * p.n_hat as i64;
    (true, moment <= 0, moment, total)
}

fn main() {
    let profile = ProfileSpec::reference();
    let map = MacroMap::new(profile.clone()).unwrap();
    let geom = *map.geometry().unwrap();
    let n = 262144usize;
    let eta = sample_mu_n(&profile, n, 5001).unwrap();
    let rep = zero_position_diagnostics(&eta, &map).unwrap();
    let mark = first_zero_at_or_after(&eta, 0).unwrap();
    let omega = to_zero_range(&eta, mark).unwrap();
    let p = TypicalityParams::new(rep.k0, &geom).unwrap();
    println!("K={} ell={} k*={} alpha_K={:.4} n_hat={} window={}", p.k, p.ell, p.k_star, p.alpha_k, p.n_hat, p.window);
    let (b_lo, b_hi) = p.band();
    println!("band [{b_lo}, {b_hi}], A size = {}", p.k - (b_hi - b_lo + 1));
    // sample some x in A: right side of band and near-zero side
    let mut fails = vec![];
    for x in (0..p.k).filter(|&x| !(x >= b_lo && x <= b_hi)) {
        let (dens_r, mom_r, m_r, tot_r) = witness_diag(&omega, &p, x);
        // left window via reversal
        let rev: Vec<u32> = omega.counts().iter().rev().copied().collect();
        let omega_rev = ZeroRangeConfig::from_counts(rev).unwrap();
        let (dens_l, mom_l, m_l, tot_l) = witness_diag(&omega_rev, &p, p.k - 1 - x);
        let ok = (dens_r && mom_r) || (dens_l && mom_l);
        if !ok && fails.len() < 8 {
            fails.push((x, dens_r, m_r, tot_r, dens_l, m_l, tot_l));
        }
    }
    println!("first failures (x, right(density, moment, total), left(density, moment, total)):");
    for (x, dr, mr, tr, dl, ml, tl) in &fails {
        println!("  x={x}: R(dens={dr}, mom={mr}, tot={tr}) L(dens={dl}, mom={ml}, tot={tl})  n_hat={}", p.n_hat);
    }
}
