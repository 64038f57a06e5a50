//! Facilitated exclusion process toolkit.
//!
//! The crate has four layers:
//!
//! * [`config`], [`local`], [`phase`], [`mapping`] — configurations on the
//!   discrete torus, the local jump rates and gradient function, the
//!   ergodic/frozen classification with two-phased decomposition, and the
//!   bijection onto zero-range configurations.
//! * [`dynamics`] — event-driven continuous-time simulation of the
//!   accelerated exclusion process, the facilitated zero-range process on
//!   the torus, its stuck variant on a sub-box, and a monotone coupled pair.
//! * [`measures`] — samplers and exact (rational-arithmetic) evaluators for
//!   the invariant measures, plus stationarity and detailed-balance
//!   verifiers.
//! * [`stefan`] and [`analysis`] — the free-boundary PDE solvers and all
//!   observables used to compare microscopic runs against the macroscopic
//!   solution.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod local;
pub mod mapping;
pub mod measures;
pub mod phase;
pub mod seeds;
pub mod stefan;
pub mod torus;

pub use config::{ConfigError, ExclusionConfig, ZeroRangeConfig};
pub use phase::{classify, classify_arc, two_phased_decompose, Classification, PhaseDecomposition, Phases};
pub use torus::{torus_distance, TorusArc};
