//! Typicality check for zero-range configurations.
//!
//! A configuration is typical when (i) no long window deep inside the
//! subcritical band has average density above 1, and (ii) every site near
//! the critical points has, to its right or left, a window of `10 ℓ_K`
//! sites holding at least `n̂ = ⌊10 ℓ_K α_K⌋` particles whose `n̂` closest
//! members have non-positive centered first moment. Condition (ii) is the
//! constructive witness; failing it is reported as "witness failed", not
//! as a proof of atypicality.
//!
//! All floors follow the scale conventions `ℓ_K = ⌊K^{3/4}⌋`,
//! `k_* = ⌊K v_*/v̄⌋`, `α_K = 1 + c_* ℓ_K / K`.

use crate::analysis::AnalysisError;
use crate::config::ZeroRangeConfig;
use crate::measures::FrontGeometry;

/// Derived scales for the typicality check at zero-range size `k`.
#[derive(Clone, Copy, Debug)]
pub struct TypicalityParams {
    pub k: usize,
    /// `ℓ_K = ⌊K^{3/4}⌋`.
    pub ell: usize,
    /// Site image of the macroscopic critical point, `⌊K v_*/v̄⌋`.
    pub k_star: usize,
    /// `1 + c_* ℓ_K / K`.
    pub alpha_k: f64,
    /// Particles required in a witness window, `⌊10 ℓ_K α_K⌋`.
    pub n_hat: u64,
    /// Witness window width `10 ℓ_K`.
    pub window: usize,
}

impl TypicalityParams {
    pub fn new(k: usize, geom: &FrontGeometry) -> Result<Self, AnalysisError> {
        let ell = (k as f64).powf(0.75).floor() as usize;
        let k_star = (k as f64 * geom.v_star / geom.v_bar).floor() as usize;
        // the subcritical band [ℓ_K, k_* - ℓ_K] must be non-degenerate
        if ell < 1 || k_star < 2 * ell || k_star >= k {
            return Err(AnalysisError::KTooSmall(k));
        }
        let alpha_k = 1.0 + geom.c_star * ell as f64 / k as f64;
        let n_hat = (10.0 * ell as f64 * alpha_k).floor() as u64;
        Ok(TypicalityParams { k, ell, k_star, alpha_k, n_hat, window: 10 * ell })
    }

    /// Subcritical band `B_K = {ℓ_K, …, k_* - ℓ_K}` (inclusive).
    pub fn band(&self) -> (usize, usize) {
        (self.ell, self.k_star - self.ell)
    }
}

/// Verdicts and witnesses of one check.
#[derive(Clone, Debug)]
pub struct TypicalityReport {
    /// Condition (i): every window of length ≥ ℓ_K inside the band has
    /// average density ≤ 1.
    pub density_ok: bool,
    /// Condition (ii): the constructive witness holds at every site
    /// outside the band.
    pub witness_ok: bool,
    /// A violating window `[start, end]` for (i), if any.
    pub density_violation: Option<(usize, usize)>,
    /// First site where both one-sided witnesses fail, if any.
    pub witness_failure: Option<usize>,
}

impl TypicalityReport {
    pub fn is_typical(&self) -> bool {
        self.density_ok && self.witness_ok
    }
}

/// Prefix sums over the cyclically repeated counts: enough copies to cover
/// a witness window starting anywhere.
struct CyclicPrefix {
    /// `s[i] = Σ_{y<i} ω_{y mod K}`.
    s: Vec<i64>,
    /// `w[i] = Σ_{y<i} y ω_{y mod K}`.
    w: Vec<i64>,
}

impl CyclicPrefix {
    fn build(counts: &[u32], span: usize) -> Self {
        let k = counts.len();
        let len = span + k + 1;
        let mut s = vec![0i64; len];
        let mut w = vec![0i64; len];
        for i in 0..len - 1 {
            let c = counts[i % k] as i64;
            s[i + 1] = s[i] + c;
            w[i + 1] = w[i] + c * i as i64;
        }
        CyclicPrefix { s, w }
    }
}

/// One-sided witness at `x` over sites `x+1 … x+window` (already mirrored
/// for the left case by the caller): keep the `n̂` particles closest to
/// `x`; they exist and their centered moment `Σ ω'_j (j - 5ℓ)` is ≤ 0.
fn side_witness(pref: &CyclicPrefix, x: usize, p: &TypicalityParams) -> bool {
    let lo = x + 1;
    let hi = lo + p.window;
    let total = (pref.s[hi] - pref.s[lo]) as u64;
    if total < p.n_hat {
        return false;
    }
    // minimal L with Σ_{j=1..L} ω_{x+j} ≥ n̂ (prefix is non-decreasing)
    let need = pref.s[lo] + p.n_hat as i64;
    let mut a = lo;
    let mut b = hi;
    while a < b {
        let mid = (a + b) / 2;
        if pref.s[mid + 1] >= need {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let j_hat = a; // absolute index of the truncation site
    let cum = pref.s[j_hat + 1] - pref.s[lo];
    let excess = cum - p.n_hat as i64;
    // Σ_{y=lo..j_hat} ω_y (y - x) minus the excess at the truncation site,
    // then recentered by 5ℓ per particle
    let raw = (pref.w[j_hat + 1] - pref.w[lo]) - x as i64 * cum;
    let moment = raw - excess * (j_hat - x) as i64 - 5 * p.ell as i64 * p.n_hat as i64;
    moment <= 0
}

/// Run both conditions; see the module docs for the conventions.
pub fn typical_check(omega: &ZeroRangeConfig, p: &TypicalityParams) -> TypicalityReport {
    assert_eq!(omega.size(), p.k, "configuration size must match the parameters");
    let counts = omega.counts();
    let (b_lo, b_hi) = p.band();

    // (i) sliding prefix minimum: max over windows [i, j] ⊆ band with
    // length ≥ ℓ of Σ (ω - 1) must stay ≤ 0
    let mut density_ok = true;
    let mut density_violation = None;
    {
        let band = &counts[b_lo..=b_hi];
        let mut pref = vec![0i64; band.len() + 1];
        for (i, &c) in band.iter().enumerate() {
            pref[i + 1] = pref[i] + c as i64 - 1;
        }
        let mut best_start = 0usize;
        for end in p.ell..=band.len() {
            // window [start, end) with end - start ≥ ℓ: minimize pref[start]
            let cand = end - p.ell;
            if pref[cand] < pref[best_start] {
                best_start = cand;
            }
            if pref[end] - pref[best_start] > 0 {
                density_ok = false;
                density_violation = Some((b_lo + best_start, b_lo + end - 1));
                break;
            }
        }
    }

    // (ii) witness at every site outside the band, right or left window
    let pref = CyclicPrefix::build(counts, p.window + p.k);
    let reversed: Vec<u32> = counts.iter().rev().copied().collect();
    let pref_rev = CyclicPrefix::build(&reversed, p.window + p.k);
    let mut witness_ok = true;
    let mut witness_failure = None;
    let in_band = |x: usize| x >= b_lo && x <= b_hi;
    for x in 0..p.k {
        if in_band(x) {
            continue;
        }
        let right = side_witness(&pref, x, p);
        let left = right || side_witness(&pref_rev, p.k - 1 - x, p);
        if !left {
            witness_ok = false;
            witness_failure = Some(x);
            break;
        }
    }

    TypicalityReport { density_ok, witness_ok, density_violation, witness_failure }
}

/// Brute-force variant of condition (i), used as the oracle in tests.
#[cfg(test)]
fn density_condition_brute(omega: &ZeroRangeConfig, p: &TypicalityParams) -> bool {
    let (b_lo, b_hi) = p.band();
    let counts = omega.counts();
    for start in b_lo..=b_hi {
        for end in start + p.ell - 1..=b_hi {
            let len = end - start + 1;
            let sum: u64 = counts[start..=end].iter().map(|&c| c as u64).sum();
            if sum > len as u64 {
                return false;
            }
        }
    }
    true
}
