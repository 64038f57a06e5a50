//! Event-driven facilitated exclusion process, accelerated by N².

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::ExclusionConfig;
use crate::dynamics::{IndexedSet, SimError, SimParams, Trajectory};
use crate::local::jump_rate;

/// Steppable exclusion simulator.
///
/// The enabled set holds the edges `(x, x+1)` with unit swap rate; every
/// enabled edge fires at rate N² on the macroscopic clock. Identical
/// `(η0, seed)` produce bit-identical paths.
pub struct FepSim {
    eta: ExclusionConfig,
    time: f64,
    enabled: IndexedSet,
    rng: ChaCha8Rng,
    edge_rate: f64,
    events: u64,
    mark: Option<usize>,
}

impl FepSim {
    pub fn new(eta0: ExclusionConfig, seed: u64) -> Result<Self, SimError> {
        let n = eta0.size();
        if n < 4 {
            return Err(SimError::TooSmall(n, 4));
        }
        let mut enabled = IndexedSet::new(n);
        for x in 0..n {
            if jump_rate(&eta0, x) == 1 {
                enabled.insert(x);
            }
        }
        Ok(FepSim {
            eta: eta0,
            time: 0.0,
            enabled,
            rng: ChaCha8Rng::seed_from_u64(seed),
            edge_rate: (n as f64) * (n as f64),
            events: 0,
            mark: None,
        })
    }

    /// Track an empty site: when a particle fills it, the mark moves to the
    /// particle's origin, so it always sits on the hole it marked.
    pub fn with_marked_zero(mut self, site: usize) -> Result<Self, SimError> {
        if self.eta.get(site) {
            return Err(SimError::MarkedSiteOccupied(site));
        }
        self.mark = Some(site);
        Ok(self)
    }

    pub fn state(&self) -> &ExclusionConfig {
        &self.eta
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn marked_zero(&self) -> Option<usize> {
        self.mark
    }

    /// Configuration seen from the marked empty site (translated so the
    /// mark sits at site 0).
    pub fn state_from_mark(&self) -> Option<ExclusionConfig> {
        let mark = self.mark?;
        let n = self.eta.size();
        let mut shifted = ExclusionConfig::empty(n);
        for x in 0..n {
            shifted.set(x, self.eta.get((mark + x) % n));
        }
        Some(shifted)
    }

    #[inline]
    fn apply_edge(&mut self, x: usize) {
        let y = self.eta.succ(x);
        // Exactly one of the two sites is empty; the hole moves to the
        // other one, carrying the mark if it sits there.
        if let Some(m) = self.mark {
            if m == x && !self.eta.get(x) {
                self.mark = Some(y);
            } else if m == y && !self.eta.get(y) {
                self.mark = Some(x);
            }
        }
        self.eta.swap(x, y);
        let n = self.eta.size();
        let mut z = (x + n - 2) % n;
        for _ in 0..5 {
            self.enabled.set_membership(z, jump_rate(&self.eta, z) == 1);
            z = self.eta.succ(z);
        }
        self.events += 1;
    }

    /// Advance the clock to `t`, executing all events before it.
    pub fn advance_to(&mut self, t: f64) {
        while self.time < t {
            let m = self.enabled.len();
            if m == 0 {
                break;
            }
            let rate = self.edge_rate * m as f64;
            let dt = <Exp1 as Distribution<f64>>::sample(&Exp1, &mut self.rng) / rate;
            if self.time + dt > t {
                self.time = t;
                return;
            }
            self.time += dt;
            let idx = self.rng.random_range(0..m);
            let edge = self.enabled.get(idx);
            self.apply_edge(edge);
        }
        self.time = t;
    }
}

/// Run the accelerated exclusion process, snapshotting at the requested
/// macroscopic times.
pub fn run_fep(eta0: ExclusionConfig, params: &SimParams) -> Result<Trajectory<ExclusionConfig>, SimError> {
    params.validate()?;
    let mut sim = FepSim::new(eta0, params.seed)?;
    let mut snapshots = Vec::with_capacity(params.observe.len());
    for &t in &params.observe {
        sim.advance_to(t);
        snapshots.push((t, sim.state().clone()));
    }
    sim.advance_to(params.horizon);
    Ok(Trajectory {
        snapshots,
        event_count: sim.events(),
        final_time: sim.time(),
        final_state: sim.eta,
    })
}

/// Like [`run_fep`], but `stop` inspects every snapshot; returning `true`
/// truncates the run at that observation time. Returns the trajectory up to
/// the stop together with the stop time, if any.
pub fn run_fep_until(
    eta0: ExclusionConfig,
    params: &SimParams,
    mut stop: impl FnMut(f64, &ExclusionConfig) -> bool,
) -> Result<(Trajectory<ExclusionConfig>, Option<f64>), SimError> {
    params.validate()?;
    let mut sim = FepSim::new(eta0, params.seed)?;
    let mut snapshots = Vec::new();
    let mut stopped = None;
    for &t in &params.observe {
        sim.advance_to(t);
        snapshots.push((t, sim.state().clone()));
        if stop(t, sim.state()) {
            stopped = Some(t);
            break;
        }
    }
    if stopped.is_none() {
        sim.advance_to(params.horizon);
    }
    Ok((
        Trajectory {
            snapshots,
            event_count: sim.events(),
            final_time: sim.time(),
            final_state: sim.eta,
        },
        stopped,
    ))
}

/// Run with a marked empty site; also returns the mark position at every
/// observation time.
pub fn run_fep_marked(
    eta0: ExclusionConfig,
    marked_zero: usize,
    params: &SimParams,
) -> Result<(Trajectory<ExclusionConfig>, Vec<(f64, usize)>), SimError> {
    params.validate()?;
    let mut sim = FepSim::new(eta0, params.seed)?.with_marked_zero(marked_zero)?;
    let mut snapshots = Vec::with_capacity(params.observe.len());
    let mut marks = Vec::with_capacity(params.observe.len());
    for &t in &params.observe {
        sim.advance_to(t);
        snapshots.push((t, sim.state().clone()));
        marks.push((t, sim.marked_zero().expect("mark is tracked")));
    }
    sim.advance_to(params.horizon);
    Ok((
        Trajectory {
            snapshots,
            event_count: sim.events(),
            final_time: sim.time(),
            final_state: sim.eta,
        },
        marks,
    ))
}
