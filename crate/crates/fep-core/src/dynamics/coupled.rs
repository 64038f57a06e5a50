//! Basic (monotone) coupling of two ordered zero-range configurations.
//!
//! Both marginals share Poisson clocks per (site, direction): when a clock
//! rings, each configuration moves a particle iff its own site holds at
//! least two. Sitewise ordering of the initial states is preserved for all
//! times, and each marginal is distributed as the plain process.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::ZeroRangeConfig;
use crate::dynamics::{IndexedSet, SimError, SimParams, Trajectory};

/// Paired trajectory; both components are sampled at the same times.
#[derive(Clone, Debug)]
pub struct CoupledTrajectory {
    pub snapshots: Vec<(f64, ZeroRangeConfig, ZeroRangeConfig)>,
    pub event_count: u64,
    pub final_low: ZeroRangeConfig,
    pub final_high: ZeroRangeConfig,
}

impl CoupledTrajectory {
    /// True when `low ≤ high` sitewise at every snapshot and at the end.
    pub fn ordered_throughout(&self) -> bool {
        self.snapshots.iter().all(|(_, lo, hi)| lo.le(hi)) && self.final_low.le(&self.final_high)
    }

    pub fn lows(&self) -> Trajectory<ZeroRangeConfig> {
        Trajectory {
            snapshots: self.snapshots.iter().map(|(t, lo, _)| (*t, lo.clone())).collect(),
            event_count: self.event_count,
            final_time: self.snapshots.last().map_or(0.0, |s| s.0),
            final_state: self.final_low.clone(),
        }
    }
}

/// Run the coupled pair from `low ≤ high`.
pub fn run_coupled_zero_range(
    low0: ZeroRangeConfig,
    high0: ZeroRangeConfig,
    params: &SimParams,
) -> Result<CoupledTrajectory, SimError> {
    params.validate()?;
    let k = low0.size();
    if k < 2 {
        return Err(SimError::TooSmall(k, 2));
    }
    if !low0.le(&high0) {
        return Err(SimError::NotOrdered);
    }

    let mut low = low0.counts().to_vec();
    let mut high = high0.counts().to_vec();
    // Clocks attach to sites active in either marginal.
    let mut active = IndexedSet::new(k);
    for x in 0..k {
        if low[x] >= 2 || high[x] >= 2 {
            active.insert(x);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut time = 0.0f64;
    let mut events = 0u64;
    let mut snapshots = Vec::with_capacity(params.observe.len());
    let mut obs = params.observe.iter().copied().peekable();

    let snap = |t: f64, low: &[u32], high: &[u32]| {
        (
            t,
            ZeroRangeConfig::from_counts(low.to_vec()).unwrap(),
            ZeroRangeConfig::from_counts(high.to_vec()).unwrap(),
        )
    };

    loop {
        let m = active.len();
        if m == 0 {
            break;
        }
        let rate = 2.0 * m as f64;
        let dt = <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng) / rate;
        let next = time + dt;
        while let Some(&t) = obs.peek() {
            if t < next {
                snapshots.push(snap(t, &low, &high));
                obs.next();
            } else {
                break;
            }
        }
        if next > params.horizon {
            break;
        }
        time = next;
        let x = active.get(rng.random_range(0..m));
        let y = if rng.random::<bool>() { (x + 1) % k } else { (x + k - 1) % k };
        if low[x] >= 2 {
            low[x] -= 1;
            low[y] += 1;
        }
        if high[x] >= 2 {
            high[x] -= 1;
            high[y] += 1;
        }
        events += 1;
        for z in [x, y] {
            active.set_membership(z, low[z] >= 2 || high[z] >= 2);
        }
    }
    for t in obs {
        snapshots.push(snap(t, &low, &high));
    }

    Ok(CoupledTrajectory {
        snapshots,
        event_count: events,
        final_low: ZeroRangeConfig::from_counts(low).unwrap(),
        final_high: ZeroRangeConfig::from_counts(high).unwrap(),
    })
}
