//! Facilitated zero-range process on the torus, plus the stuck variant on a
//! sub-box used for exit-time experiments.
//!
//! A site holding at least two particles emits one to each neighbor at rate
//! 1 (total rate 2 per active site); time is microscopic. The stuck variant
//! cancels every jump originating outside a fixed box, so particles freeze
//! once they leave it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::ZeroRangeConfig;
use crate::dynamics::{IndexedSet, SimError, SimParams, Trajectory};
use crate::torus::TorusArc;

/// Running occupancy supremum, checked at every event.
#[derive(Clone, Copy, Debug)]
pub struct OccupancyRecord {
    pub cap: f64,
    pub max_count: u32,
    /// First time a site reached the cap, if ever.
    pub first_breach: Option<f64>,
}

impl OccupancyRecord {
    /// True when the occupancy stayed strictly below the cap up to `t`.
    pub fn held_until(&self, t: f64) -> bool {
        self.first_breach.map_or(true, |b| b > t)
    }
}

/// Box and occupancy threshold of the stuck process.
#[derive(Clone, Debug)]
pub struct StuckParams {
    pub arc: TorusArc,
    /// Defaults to `ln²|Λ|` when `None`.
    pub cap: Option<f64>,
}

impl StuckParams {
    pub fn new(arc: TorusArc) -> Self {
        StuckParams { arc, cap: None }
    }

    fn effective_cap(&self) -> f64 {
        self.cap.unwrap_or_else(|| {
            let l = self.arc.len() as f64;
            l.ln() * l.ln()
        })
    }
}

/// Steppable zero-range simulator.
pub struct ZrSim {
    counts: Vec<u32>,
    time: f64,
    active: IndexedSet,
    rng: ChaCha8Rng,
    events: u64,
    max_seen: u32,
    cap: Option<f64>,
    first_breach: Option<f64>,
    /// Jumps may only originate inside this arc (stuck process).
    origin: Option<TorusArc>,
    /// Exit time of the stuck process, once reached.
    exit_time: Option<f64>,
}

impl ZrSim {
    pub fn new(omega0: ZeroRangeConfig, seed: u64) -> Result<Self, SimError> {
        let k = omega0.size();
        if k < 2 {
            return Err(SimError::TooSmall(k, 2));
        }
        let mut sim = ZrSim {
            counts: omega0.counts().to_vec(),
            time: 0.0,
            active: IndexedSet::new(k),
            rng: ChaCha8Rng::seed_from_u64(seed),
            events: 0,
            max_seen: omega0.max_count(),
            cap: None,
            first_breach: None,
            origin: None,
            exit_time: None,
        };
        sim.rebuild_active();
        Ok(sim)
    }

    /// Record the running occupancy supremum against `cap`.
    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = Some(cap);
        if self.max_seen as f64 >= cap {
            self.first_breach = Some(0.0);
        }
        self
    }

    /// Restrict jump origins to `arc` (stuck process).
    fn with_origin(mut self, arc: TorusArc) -> Result<Self, SimError> {
        if arc.is_empty() || arc.is_full() {
            return Err(SimError::BadStuckBox);
        }
        self.origin = Some(arc);
        self.rebuild_active();
        self.check_stuck_exit();
        Ok(self)
    }

    fn rebuild_active(&mut self) {
        let k = self.counts.len();
        self.active = IndexedSet::new(k);
        for x in 0..k {
            if self.is_active(x) {
                self.active.insert(x);
            }
        }
    }

    #[inline]
    fn is_active(&self, x: usize) -> bool {
        self.counts[x] >= 2 && self.origin.as_ref().map_or(true, |arc| arc.contains(x))
    }

    fn check_stuck_exit(&mut self) {
        if self.origin.is_none() || self.exit_time.is_some() {
            return;
        }
        let breached = self.cap.is_some_and(|cap| self.max_seen as f64 > cap);
        if self.active.is_empty() || breached {
            self.exit_time = Some(self.time);
        }
    }

    pub fn state(&self) -> ZeroRangeConfig {
        ZeroRangeConfig::from_counts(self.counts.clone()).expect("nonempty")
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn exit_time(&self) -> Option<f64> {
        self.exit_time
    }

    pub fn occupancy(&self) -> OccupancyRecord {
        OccupancyRecord {
            cap: self.cap.unwrap_or(f64::INFINITY),
            max_count: self.max_seen,
            first_breach: self.first_breach,
        }
    }

    /// Execute at most one event before `t_max`; true when one fired.
    pub fn step(&mut self, t_max: f64) -> bool {
        let before = self.events;
        self.advance(t_max, 1);
        self.events > before
    }

    /// Advance to time `t` (or to the stuck exit, whichever comes first).
    pub fn advance_to(&mut self, t: f64) {
        self.advance(t, u64::MAX);
    }

    fn advance(&mut self, t: f64, mut budget: u64) {
        if self.exit_time.is_some() {
            self.time = t.max(self.time);
            return;
        }
        while self.time < t && budget > 0 {
            let m = self.active.len();
            if m == 0 {
                break;
            }
            let rate = 2.0 * m as f64;
            let dt = <Exp1 as Distribution<f64>>::sample(&Exp1, &mut self.rng) / rate;
            if self.time + dt > t {
                self.time = t;
                return;
            }
            self.time += dt;
            let idx = self.rng.random_range(0..m);
            let x = self.active.get(idx);
            let k = self.counts.len();
            let y = if self.rng.random::<bool>() { (x + 1) % k } else { (x + k - 1) % k };
            self.counts[x] -= 1;
            self.counts[y] += 1;
            self.events += 1;
            budget -= 1;
            if self.counts[y] > self.max_seen {
                self.max_seen = self.counts[y];
                if let (Some(cap), None) = (self.cap, self.first_breach) {
                    if self.max_seen as f64 >= cap {
                        self.first_breach = Some(self.time);
                    }
                }
            }
            let xa = self.is_active(x);
            let ya = self.is_active(y);
            self.active.set_membership(x, xa);
            self.active.set_membership(y, ya);
            if self.origin.is_some() {
                self.check_stuck_exit();
                if self.exit_time.is_some() {
                    return;
                }
            }
        }
        if budget > 0 {
            self.time = t;
        }
    }
}

fn snapshot_run(mut sim: ZrSim, params: &SimParams) -> (ZrSim, Trajectory<ZeroRangeConfig>) {
    let mut snapshots = Vec::with_capacity(params.observe.len());
    for &t in &params.observe {
        sim.advance_to(t);
        if sim.exit_time.is_some_and(|e| e <= t) {
            break;
        }
        snapshots.push((t, sim.state()));
    }
    sim.advance_to(params.horizon);
    let traj = Trajectory {
        snapshots,
        event_count: sim.events(),
        final_time: sim.exit_time().unwrap_or(params.horizon),
        final_state: sim.state(),
    };
    (sim, traj)
}

/// Run the zero-range process on the torus.
pub fn run_zero_range(
    omega0: ZeroRangeConfig,
    params: &SimParams,
) -> Result<Trajectory<ZeroRangeConfig>, SimError> {
    params.validate()?;
    let sim = ZrSim::new(omega0, params.seed)?;
    Ok(snapshot_run(sim, params).1)
}

/// Run while recording the occupancy supremum against `cap`.
pub fn run_zero_range_monitored(
    omega0: ZeroRangeConfig,
    params: &SimParams,
    cap: f64,
) -> Result<(Trajectory<ZeroRangeConfig>, OccupancyRecord), SimError> {
    params.validate()?;
    let sim = ZrSim::new(omega0, params.seed)?.with_cap(cap);
    let (sim, traj) = snapshot_run(sim, params);
    Ok((traj, sim.occupancy()))
}

/// Run the stuck process: jumps originate only inside `stuck.arc`, and the
/// run ends at the exit time `T_χ` — the first moment some site exceeds the
/// occupancy cap or every box site holds at most one particle — or at the
/// horizon. Returns the truncated trajectory and `T_χ` if it was reached.
pub fn run_stuck_zero_range(
    omega0: ZeroRangeConfig,
    stuck: &StuckParams,
    params: &SimParams,
) -> Result<(Trajectory<ZeroRangeConfig>, Option<f64>), SimError> {
    params.validate()?;
    if stuck.arc.torus_size() != omega0.size() {
        return Err(SimError::BadStuckBox);
    }
    let cap = stuck.effective_cap();
    let sim = ZrSim::new(omega0, params.seed)?.with_cap(cap).with_origin(stuck.arc)?;
    let (sim, traj) = snapshot_run(sim, params);
    let exit = sim.exit_time();
    Ok((traj, exit))
}
