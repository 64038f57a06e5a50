//! Ergodic/frozen classification and the two-phased decomposition.
//!
//! A window is *ergodic* when all its empty sites are isolated and *frozen*
//! when all its particles are isolated. A configuration is *two-phased*
//! when the torus splits into one connected ergodic arc and one connected
//! frozen arc; the frozen arc's endpoints are the microscopic fronts.
//!
//! Conventions (deterministic, exercised by the regression tests):
//! * the frozen arc is the minimal arc whose interior edges contain every
//!   00-edge and avoid every 11-edge; ties are broken by the smallest
//!   start index;
//! * a configuration that is ergodic on the full torus reports `Ergodic`
//!   with no frozen arc, and one that is frozen on the full torus (e.g.
//!   `η ≡ 0`) reports a frozen arc covering the whole torus;
//! * after the fronts merge and the configuration turns ergodic, a tracker
//!   holds the last frozen-arc endpoints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ExclusionConfig;
use crate::torus::TorusArc;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("classification window is empty")]
    EmptyWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// All empty sites isolated.
    Ergodic,
    /// All particles isolated; the dynamics is fully blocked.
    Frozen,
    /// Both at once (alternating particle/empty configurations).
    Both,
    /// Neither; evolves until it falls into one of the other classes.
    Transient,
}

/// Classify the restriction of `eta` to a window.
///
/// Interior edges of the arc are inspected; when the arc is the full torus
/// the wrap edge counts as well.
pub fn classify_arc(eta: &ExclusionConfig, window: &TorusArc) -> Result<Classification, PhaseError> {
    if window.is_empty() {
        return Err(PhaseError::EmptyWindow);
    }
    let edges = if window.is_full() { window.len() } else { window.len() - 1 };
    let mut ergodic = true;
    let mut frozen = true;
    let mut x = window.first();
    for _ in 0..edges {
        let y = eta.succ(x);
        let s = eta.occ(x) + eta.occ(y);
        if s < 1 {
            ergodic = false;
        }
        if s > 1 {
            frozen = false;
        }
        x = y;
    }
    Ok(match (ergodic, frozen) {
        (true, true) => Classification::Both,
        (true, false) => Classification::Ergodic,
        (false, true) => Classification::Frozen,
        (false, false) => Classification::Transient,
    })
}

/// Classify on the full torus (wrap edge included).
pub fn classify(eta: &ExclusionConfig) -> Classification {
    classify_arc(eta, &TorusArc::full(eta.size())).expect("full torus is nonempty")
}

/// A two-phased split: ergodic arc `E` and frozen arc `F` partitioning the
/// torus, with the microscopic fronts at the frozen arc's endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseDecomposition {
    pub frozen: TorusArc,
    /// Complementary ergodic arc; empty when the whole torus is frozen.
    pub ergodic: TorusArc,
}

impl PhaseDecomposition {
    /// Left front `u^N_- = min F`.
    pub fn front_left(&self) -> usize {
        self.frozen.first()
    }

    /// Right front `u^N_+ = max F`.
    pub fn front_right(&self) -> usize {
        self.frozen.last()
    }
}

/// Result of a successful two-phased decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phases {
    /// Ergodic on the full torus; no frozen arc.
    Ergodic,
    /// Non-ergodic two-phased configuration.
    TwoPhased(PhaseDecomposition),
}

/// Decompose a configuration into its ergodic and frozen arcs.
///
/// Returns `None` when no valid split exists (the configuration is still
/// transient in an essential way: some 00-edge and some 11-edge interleave
/// around the circle).
pub fn two_phased_decompose(eta: &ExclusionConfig) -> Option<Phases> {
    let n = eta.size();
    debug_assert!(n >= 2);

    // Edge x is the pair (x, x+1); record empty-empty and occupied-occupied edges.
    let mut ee = Vec::new();
    let mut pp = vec![false; n];
    let mut pp_count = 0usize;
    for x in 0..n {
        let a = eta.get(x);
        let b = eta.get(eta.succ(x));
        if !a && !b {
            ee.push(x);
        }
        if a && b {
            pp[x] = true;
            pp_count += 1;
        }
    }

    if ee.is_empty() {
        return Some(Phases::Ergodic);
    }
    if pp_count == 0 {
        // Frozen on the full torus; the whole ring is the frozen arc.
        return Some(Phases::TwoPhased(PhaseDecomposition {
            frozen: TorusArc::full(n),
            ergodic: TorusArc::empty(n),
        }));
    }

    // Prefix sums of 11-edges for O(1) circular range queries.
    let mut pref = vec![0usize; n + 1];
    for x in 0..n {
        pref[x + 1] = pref[x] + pp[x] as usize;
    }
    let pp_in = |a: usize, b: usize| -> usize {
        // Number of 11-edges on the circular edge interval a..=b.
        if a <= b {
            pref[b + 1] - pref[a]
        } else {
            pref[n] - pref[a] + pref[b + 1]
        }
    };

    // For each circular gap between consecutive 00-edges, the candidate
    // frozen arc runs from the edge after the gap to the edge before it.
    // It is valid when it avoids all 11-edges and leaves a nonempty
    // ergodic arc. Pick the minimal frozen arc, smallest start on ties.
    let m = ee.len();
    let mut best: Option<(usize, usize)> = None; // (frozen len, start site)
    for i in 0..m {
        let z_last = ee[i];
        let z_first = ee[(i + 1) % m];
        // clockwise steps from z_last to z_first; the full circle when a
        // single 00-edge pairs with itself
        let gap = if m == 1 { n } else { (z_first + n - z_last) % n };
        if gap < 3 {
            // frozen arc would cover the torus, leaving no ergodic arc;
            // the fully frozen case was already handled above
            continue;
        }
        if pp_in(z_first, z_last) > 0 {
            continue;
        }
        let f_len = n + 2 - gap;
        let cand = (f_len, z_first);
        if best.map_or(true, |b| cand < b) {
            best = Some(cand);
        }
    }

    let (flen, start) = best?;
    let frozen = TorusArc::new(n, start, flen);
    Some(Phases::TwoPhased(PhaseDecomposition { ergodic: frozen.complement(), frozen }))
}

/// Tracks microscopic fronts along a trajectory, applying the hold-on-merge
/// convention once the configuration becomes ergodic.
#[derive(Clone, Debug)]
pub struct FrontTracker {
    last: Option<(usize, usize)>,
    merged: bool,
}

impl FrontTracker {
    pub fn new() -> Self {
        FrontTracker { last: None, merged: false }
    }

    pub fn observe(&mut self, phases: Option<&Phases>) {
        if self.merged {
            return;
        }
        match phases {
            Some(Phases::TwoPhased(d)) => self.last = Some((d.front_left(), d.front_right())),
            Some(Phases::Ergodic) => {
                if self.last.is_some() {
                    self.merged = true;
                }
            }
            None => {}
        }
    }

    pub fn observe_config(&mut self, eta: &ExclusionConfig) {
        let phases = two_phased_decompose(eta);
        self.observe(phases.as_ref());
    }

    /// Current fronts `(u^N_-, u^N_+)`; `None` while the trajectory has
    /// never been two-phased.
    pub fn fronts(&self) -> Option<(usize, usize)> {
        self.last
    }

    pub fn merged(&self) -> bool {
        self.merged
    }
}

impl Default for FrontTracker {
    fn default() -> Self {
        Self::new()
    }
}

/// Front positions per observation from a history of decompositions.
pub fn front_positions(history: &[Option<Phases>]) -> Vec<Option<(usize, usize)>> {
    let mut tracker = FrontTracker::new();
    history
        .iter()
        .map(|phases| {
            tracker.observe(phases.as_ref());
            tracker.fronts()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExclusionConfig {
        ExclusionConfig::from_text(text).unwrap()
    }

    #[test]
    fn classify_segments() {
        let n = 10;
        // Segment matching the ergodic panel of the intro figure.
        let erg = cfg("0110101110");
        let win = TorusArc::new(n, 0, n - 1); // ignore the wrap edge
        assert_eq!(classify_arc(&erg, &win).unwrap(), Classification::Ergodic);
        // Segment with isolated particles only.
        let froz = cfg("001000100");
        let win = TorusArc::new(9, 0, 8);
        assert_eq!(classify_arc(&froz, &win).unwrap(), Classification::Frozen);
        // Alternating ring is both ergodic and frozen.
        assert_eq!(classify(&cfg("010101")), Classification::Both);
        assert_eq!(classify(&cfg("110010")), Classification::Transient);
    }

    #[test]
    fn classify_rejects_empty_window() {
        let eta = cfg("0101");
        assert_eq!(classify_arc(&eta, &TorusArc::empty(4)), Err(PhaseError::EmptyWindow));
    }

    #[test]
    fn classify_wrap_edge_counts() {
        // 00 only across the wrap edge: ergodic as a segment, not as a ring.
        let eta = cfg("0110");
        assert_eq!(classify_arc(&eta, &TorusArc::new(4, 0, 3)).unwrap(), Classification::Ergodic);
        assert_eq!(classify(&eta), Classification::Transient);
    }

    #[test]
    fn decompose_eleven_site_example() {
        let eta = cfg("11010001011");
        match two_phased_decompose(&eta).unwrap() {
            Phases::TwoPhased(d) => {
                assert_eq!(d.front_left(), 4);
                assert_eq!(d.front_right(), 6);
                assert_eq!(d.frozen.len(), 3);
                assert_eq!(d.ergodic.first(), 7);
                assert_eq!(d.ergodic.last(), 3);
            }
            other => panic!("expected a two-phased split, got {other:?}"),
        }
    }

    #[test]
    fn decompose_degenerate_cases() {
        assert_eq!(two_phased_decompose(&ExclusionConfig::filled(6)), Some(Phases::Ergodic));
        // η ≡ 0 is frozen with the frozen arc covering the torus.
        match two_phased_decompose(&ExclusionConfig::empty(6)).unwrap() {
            Phases::TwoPhased(d) => {
                assert!(d.frozen.is_full());
                assert!(d.ergodic.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
        // Interleaved 00 and 11 edges admit no split.
        assert_eq!(two_phased_decompose(&cfg("11001100")), None);
    }

    #[test]
    fn fully_frozen_rings_keep_the_whole_torus() {
        // Frozen on the full torus (isolated particles) even though a
        // smaller frozen arc would leave an ergodic singleton.
        match two_phased_decompose(&cfg("0010")).unwrap() {
            Phases::TwoPhased(d) => assert!(d.frozen.is_full()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn front_history_conventions() {
        let split = |text: &str| two_phased_decompose(&cfg(text));
        // Two-phased then ergodic: fronts freeze at their last positions.
        let history = vec![split("11010001011"), Some(Phases::Ergodic)];
        let fronts = front_positions(&history);
        assert_eq!(fronts, vec![Some((4, 6)), Some((4, 6))]);

        // Never two-phased: undefined throughout.
        assert_eq!(front_positions(&[None, None]), vec![None, None]);
    }

    #[test]
    fn front_tracker_monotone_merge() {
        let mut tracker = FrontTracker::new();
        let mk = |start, len| {
            let frozen = TorusArc::new(12, start, len);
            Phases::TwoPhased(PhaseDecomposition { ergodic: frozen.complement(), frozen })
        };
        tracker.observe(Some(&mk(3, 5))); // F = [3,7]
        tracker.observe(Some(&mk(4, 3))); // F = [4,6]
        tracker.observe(Some(&Phases::Ergodic));
        assert_eq!(tracker.fronts(), Some((4, 6)));
        assert!(tracker.merged());
        // Later observations cannot move held fronts.
        tracker.observe(Some(&mk(1, 2)));
        assert_eq!(tracker.fronts(), Some((4, 6)));
    }
}
