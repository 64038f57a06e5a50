//! Experiment orchestration: reproducible ensemble runs over the
//! simulators and solvers in `fep-core`, with manifests, CSV outputs and
//! machine-readable verdicts.

pub mod experiments;
pub mod manifest;
pub mod sink;
pub mod spec;
pub mod verify;

/// Effective worker count: the `FEP_WORKERS` environment variable
/// overrides the CLI flag; both default to the machine's parallelism.
pub fn worker_count(flag: Option<usize>) -> usize {
    let env = std::env::var("FEP_WORKERS").ok().and_then(|s| s.parse::<usize>().ok());
    env.or(flag)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1)
}

/// Build a rayon pool with the requested worker count. Replica-level
/// parallelism only; results are collected in replica order, so outputs do
/// not depend on scheduling.
pub fn make_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool")
}
