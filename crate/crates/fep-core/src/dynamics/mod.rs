//! Continuous-time Markov simulation.
//!
//! All enabled transitions of both processes carry equal rates, so the
//! rejection-free loop reduces to: draw an exponential holding time with
//! rate (enabled count) × (per-transition rate), pick an enabled transition
//! uniformly, apply it, and patch the enabled set in O(1). Snapshots pause
//! the clock at the requested observation times.
//!
//! A single trajectory runs on one thread; distinct seeds may run
//! concurrently.

mod coupled;
mod fep;
mod zero_range;

pub use coupled::{run_coupled_zero_range, CoupledTrajectory};
pub use fep::{run_fep, run_fep_marked, run_fep_until, FepSim};
pub use zero_range::{
    run_stuck_zero_range, run_zero_range, run_zero_range_monitored, OccupancyRecord, StuckParams,
    ZrSim,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("horizon must be non-negative, got {0}")]
    NegativeHorizon(f64),
    #[error("observation times must be sorted, non-negative and within the horizon")]
    BadObservationTimes,
    #[error("system size {0} below the minimum {1}")]
    TooSmall(usize, usize),
    #[error("marked site {0} is occupied")]
    MarkedSiteOccupied(usize),
    #[error("initial configurations are not sitewise ordered")]
    NotOrdered,
    #[error("invalid stuck box: must be nonempty and a proper subset of the torus")]
    BadStuckBox,
}

/// Horizon, observation times and seed of a single run.
///
/// Exclusion times are macroscopic (the generator is accelerated by N²);
/// zero-range times are microscopic.
#[derive(Clone, Debug)]
pub struct SimParams {
    pub horizon: f64,
    pub observe: Vec<f64>,
    pub seed: u64,
}

impl SimParams {
    pub fn new(horizon: f64, observe: Vec<f64>, seed: u64) -> Self {
        SimParams { horizon, observe, seed }
    }

    pub(crate) fn validate(&self) -> Result<(), SimError> {
        if !(self.horizon >= 0.0) {
            return Err(SimError::NegativeHorizon(self.horizon));
        }
        let sorted = self.observe.windows(2).all(|w| w[0] <= w[1]);
        let in_range = self.observe.iter().all(|&t| t >= 0.0 && t <= self.horizon);
        if !sorted || !in_range {
            return Err(SimError::BadObservationTimes);
        }
        Ok(())
    }
}

/// A simulated path: snapshots at the requested times plus the final state.
#[derive(Clone, Debug)]
pub struct Trajectory<C> {
    pub snapshots: Vec<(f64, C)>,
    pub event_count: u64,
    pub final_time: f64,
    pub final_state: C,
}

/// Set of enabled transition indices with O(1) insert/remove/uniform pick.
#[derive(Clone, Debug)]
pub(crate) struct IndexedSet {
    members: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexedSet {
    pub fn new(capacity: usize) -> Self {
        IndexedSet { members: Vec::with_capacity(capacity), pos: vec![ABSENT; capacity] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[cfg(test)]
    pub fn contains(&self, x: usize) -> bool {
        self.pos[x] != ABSENT
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.members[i] as usize
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        if self.pos[x] == ABSENT {
            self.pos[x] = self.members.len() as u32;
            self.members.push(x as u32);
        }
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        let p = self.pos[x];
        if p == ABSENT {
            return;
        }
        let last = *self.members.last().unwrap();
        self.members[p as usize] = last;
        self.pos[last as usize] = p;
        self.members.pop();
        self.pos[x] = ABSENT;
    }

    #[inline]
    pub fn set_membership(&mut self, x: usize, member: bool) {
        if member {
            self.insert(x);
        } else {
            self.remove(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_set_swap_remove() {
        let mut s = IndexedSet::new(8);
        for x in [3, 5, 1] {
            s.insert(x);
        }
        assert_eq!(s.len(), 3);
        s.insert(3); // idempotent
        assert_eq!(s.len(), 3);
        s.remove(3);
        assert!(!s.contains(3) && s.contains(5) && s.contains(1));
        s.remove(3);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn params_validation() {
        assert!(SimParams::new(1.0, vec![0.2, 0.5], 1).validate().is_ok());
        assert_eq!(
            SimParams::new(-1.0, vec![], 1).validate(),
            Err(SimError::NegativeHorizon(-1.0))
        );
        assert_eq!(
            SimParams::new(1.0, vec![0.5, 0.2], 1).validate(),
            Err(SimError::BadObservationTimes)
        );
        assert_eq!(
            SimParams::new(1.0, vec![0.5, 2.0], 1).validate(),
            Err(SimError::BadObservationTimes)
        );
    }
}
