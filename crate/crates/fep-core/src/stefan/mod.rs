//! Free-boundary PDE on the torus: `∂_t ρ = ∂_u² H(ρ)` with
//! `H(r) = (2r-1)/r` above 1/2 and 0 below.
//!
//! Two solvers:
//! * [`solve_weak`] — monotone explicit scheme on a fixed periodic grid,
//!   no front tracking; converges to the weak solution.
//! * [`solve_classical`] — moving-boundary solver for regularized initial
//!   data: diffusion on the active arc with Dirichlet value 1/2 at the
//!   fronts, front speeds from the one-sided gradient ODE, cut-cell mass
//!   bookkeeping that conserves total mass to rounding.

mod classical;
mod interface;
mod weak;
mod weak_form;

pub use classical::{profile_cell_averages, solve_classical};
pub use interface::{extract_interfaces, InterfaceState, InterfaceTrajectory};
pub use weak::solve_weak;
pub use weak_form::{comparison_check, weak_form_residual, ComparisonReport, TestFunction};

use thiserror::Error;

use crate::measures::{ProfileError, ProfileSpec};

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("time step {dt} violates the stability bound {max} (Δu²/8)")]
    CflViolation { dt: f64, max: f64 },
    #[error("snapshot times must be sorted, non-negative and within the horizon")]
    BadSnapshotTimes,
    #[error("field list is empty or not sorted by time")]
    BadFieldList,
    #[error("no supercritical phase at t={0}: interfaces undefined")]
    EntirelySubcritical(f64),
    #[error("{count} subcritical arcs at t={time}: single-arc front geometry violated")]
    MultipleSubcriticalArcs { time: f64, count: usize },
    #[error("front speed denominator {0} below 1e-6; increase the regularization index")]
    FrontDenominatorTooSmall(f64),
    #[error("initial profile unsuitable: {0}")]
    BadProfile(#[from] ProfileError),
    #[error("grid too coarse for the moving-boundary layout")]
    GridTooCoarse,
}

/// Flux function, assumed-valid fast path for solver loops.
#[inline]
pub(crate) fn flux(r: f64) -> f64 {
    if r <= 0.5 {
        0.0
    } else {
        (2.0 * r - 1.0) / r
    }
}

/// Periodic density field: `values[i]` at grid point `i/M`.
#[derive(Clone, Debug)]
pub struct DensityField {
    pub m: usize,
    pub values: Vec<f64>,
    pub time: f64,
}

impl DensityField {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        assert!(!values.is_empty());
        DensityField { m: values.len(), values, time }
    }

    pub fn constant(m: usize, value: f64, time: f64) -> Self {
        DensityField::new(vec![value; m], time)
    }

    /// Pointwise evaluation of a profile on the grid.
    pub fn from_profile(profile: &ProfileSpec, m: usize) -> Self {
        DensityField::new((0..m).map(|i| profile.eval(i as f64 / m as f64)).collect(), 0.0)
    }

    /// Total mass `(1/M) Σ ρ_i`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.m as f64
    }

    /// Periodic linear interpolation at `u`.
    pub fn at(&self, u: f64) -> f64 {
        let x = u.rem_euclid(1.0) * self.m as f64;
        let i = x.floor() as usize % self.m;
        let frac = x - x.floor();
        let j = (i + 1) % self.m;
        self.values[i] * (1.0 - frac) + self.values[j] * frac
    }
}

/// Discretization parameters shared by both solvers.
#[derive(Clone, Debug)]
pub struct SolverParams {
    pub m: usize,
    /// Defaults to half the stability bound, `Δu²/16`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    /// Classical solver only: stop as soon as the fronts merge.
    pub stop_after_merge: bool,
}

impl SolverParams {
    pub fn new(m: usize, t_end: f64, snapshot_times: Vec<f64>) -> Self {
        SolverParams { m, dt: None, t_end, snapshot_times, stop_after_merge: false }
    }

    pub fn max_stable_dt(&self) -> f64 {
        let du = 1.0 / self.m as f64;
        du * du / 8.0
    }

    /// Effective time step of the march.
    pub fn step_dt(&self) -> f64 {
        self.dt.unwrap_or(0.5 * self.max_stable_dt())
    }

    pub(crate) fn validate(&self) -> Result<(), PdeError> {
        assert!(self.m >= 8, "grid too small");
        let dt = self.step_dt();
        if dt > self.max_stable_dt() * (1.0 + 1e-12) {
            return Err(PdeError::CflViolation { dt, max: self.max_stable_dt() });
        }
        let sorted = self.snapshot_times.windows(2).all(|w| w[0] <= w[1]);
        let in_range = self.snapshot_times.iter().all(|&t| t >= 0.0 && t <= self.t_end + 1e-12);
        if !(self.t_end >= 0.0 && sorted && in_range) {
            return Err(PdeError::BadSnapshotTimes);
        }
        Ok(())
    }
}
