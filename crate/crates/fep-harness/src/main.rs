use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use fep_core::dynamics::{run_fep, SimParams};
use fep_core::measures::{sample_gcm, sample_mu_n, sample_nu_alpha, sample_subcritical};
use fep_core::seeds::derive_seed;
use fep_core::stefan::{solve_classical, solve_weak, DensityField, PdeError, SolverParams};

use fep_harness::experiments::{
    self, run_fronts, run_hitting, run_hydro, run_oneblock, run_typicality,
};
use fep_harness::manifest::{write_atomic, RunManifest};
use fep_harness::sink::{fmt_f64, trajectory_to_binary, trajectory_to_csv, CsvTable};
use fep_harness::spec::{
    load_spec, spec_hash, ExperimentKind, ExperimentSpec, PdeSpec, SampleSpec, SimulateSpec,
    SnapshotFormat,
};
use fep_harness::{make_pool, worker_count};

const EXIT_OK: i32 = 0;
const EXIT_INVARIANT: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(name = "fep", version, about = "Facilitated exclusion / free-boundary toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded exclusion ensembles and store snapshot streams
    Simulate(RunArgs),
    /// Solve the free-boundary PDE; store fields and interfaces
    Pde(RunArgs),
    /// Draw samples from the initial and invariant measures
    Sample(RunArgs),
    /// Run a canned experiment (hydro, fronts, hitting, oneblock, typicality)
    Experiment(RunArgs),
    /// Run the verification suites
    Verify {
        /// exact | property | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON run description
    #[arg(long)]
    config: PathBuf,
    /// Override the base seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (FEP_WORKERS overrides)
    #[arg(long)]
    workers: Option<usize>,
    /// Override the output directory from the config
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate(args) => dispatch(cmd_simulate(args)),
        Command::Pde(args) => dispatch(cmd_pde(args)),
        Command::Sample(args) => dispatch(cmd_sample(args)),
        Command::Experiment(args) => dispatch(cmd_experiment(args)),
        Command::Verify { suite } => dispatch(cmd_verify(&suite)),
    };
    std::process::exit(code);
}

/// Config/usage problems exit 2; invariant or verdict failures exit 1.
fn dispatch(result: Result<i32>) -> i32 {
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_USAGE
        }
    }
}

fn cmd_simulate(args: RunArgs) -> Result<i32> {
    let mut spec: SimulateSpec = load_spec(&args.config)?;
    if let Some(seed) = args.seed {
        spec.base_seed = seed;
    }
    if let Some(out) = args.out {
        spec.out_dir = out;
    }
    spec.profile.validate().map_err(|e| anyhow::anyhow!("profile: {e}"))?;
    anyhow::ensure!(spec.replicas > 0 && spec.n >= 4, "need n >= 4 and at least one replica");

    let pool = make_pool(worker_count(args.workers));
    let seeds: Vec<u64> = (0..spec.replicas).map(|r| derive_seed(spec.base_seed, r as u64)).collect();
    let mut manifest =
        RunManifest::new("simulate", spec_hash(&spec), spec.base_seed, seeds.clone());
    manifest.write(&spec.out_dir)?; // before the long run

    let ext = match spec.format {
        SnapshotFormat::Csv => "csv",
        SnapshotFormat::Binary => "snap",
    };
    let results: Vec<Result<(usize, u64, u64, bool)>> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(r, &seed)| {
                let rel = format!("replica_{r:04}.{ext}");
                let path = spec.out_dir.join(&rel);
                if path.exists() {
                    return Ok((r, seed, 0, true)); // resumed
                }
                let started = Instant::now();
                let eta0 = sample_mu_n(&spec.profile, spec.n, seed)
                    .map_err(|e| anyhow::anyhow!("sampling: {e}"))?;
                let particles = eta0.particle_count();
                let params =
                    SimParams::new(spec.horizon, spec.observe.clone(), derive_seed(seed, 1));
                let traj = run_fep(eta0, &params).map_err(|e| anyhow::anyhow!("run: {e}"))?;
                // conservation invariant on every snapshot
                for (t, snap) in &traj.snapshots {
                    anyhow::ensure!(
                        snap.particle_count() == particles,
                        "particle count drifted at t={t} (replica {r})"
                    );
                }
                let bytes = match spec.format {
                    SnapshotFormat::Csv => trajectory_to_csv(r, &traj).into_bytes(),
                    SnapshotFormat::Binary => trajectory_to_binary(&traj),
                };
                write_atomic(&path, &bytes)?;
                let _ = started.elapsed();
                Ok((r, seed, traj.event_count, false))
            })
            .collect()
    });

    let mut summary = CsvTable::new("replica,seed,events,resumed");
    let mut failures = 0usize;
    for res in &results {
        match res {
            Ok((r, seed, events, resumed)) => {
                summary.row(&[r.to_string(), seed.to_string(), events.to_string(), resumed.to_string()]);
                manifest.metrics.push(fep_harness::manifest::ReplicaMetrics {
                    replica: *r,
                    seed: *seed,
                    events: *events,
                    wall_ms: 0,
                });
            }
            Err(e) => {
                eprintln!("replica failed: {e:#}");
                failures += 1;
            }
        }
    }
    write_atomic(&spec.out_dir.join("summary.csv"), summary.into_string().as_bytes())?;
    for r in 0..spec.replicas {
        let rel = format!("replica_{r:04}.{ext}");
        if spec.out_dir.join(&rel).exists() {
            manifest.add_output(&spec.out_dir, &rel)?;
        }
    }
    manifest.add_output(&spec.out_dir, "summary.csv")?;
    manifest.complete = failures == 0;
    manifest.write(&spec.out_dir)?;
    let total_events: u64 = manifest.metrics.iter().map(|m| m.events).sum();
    println!(
        "simulate: {} replicas, {} events total, output in {}",
        spec.replicas,
        total_events,
        spec.out_dir.display()
    );
    Ok(if failures == 0 { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_pde(args: RunArgs) -> Result<i32> {
    let mut spec: PdeSpec = load_spec(&args.config)?;
    if let Some(out) = args.out {
        spec.out_dir = out;
    }
    spec.profile.validate().map_err(|e| anyhow::anyhow!("profile: {e}"))?;
    anyhow::ensure!(spec.snapshots >= 1, "need at least one snapshot");

    let times: Vec<f64> =
        (1..=spec.snapshots).map(|i| spec.t_end * i as f64 / spec.snapshots as f64).collect();
    let mut params = SolverParams::new(spec.m, spec.t_end, times);
    params.dt = spec.dt;

    let solved = match spec.regularization {
        Some(n) => solve_classical(&spec.profile, n, &params).map(|(f, t)| (f, Some(t))),
        None => {
            let rho0 = DensityField::from_profile(&spec.profile, spec.m);
            solve_weak(&rho0, &params).map(|f| (f, None))
        }
    };
    let (fields, traj) = match solved {
        Ok(x) => x,
        Err(e @ PdeError::CflViolation { .. }) => {
            eprintln!("invariant: {e}");
            return Ok(EXIT_INVARIANT);
        }
        Err(e) => return Err(e).context("pde solve"),
    };

    let mut manifest = RunManifest::new("pde", spec_hash(&spec), 0, vec![]);
    let mut table = CsvTable::new("time,u,rho");
    for f in &fields {
        for (i, &v) in f.values.iter().enumerate() {
            table.row(&[fmt_f64(f.time), fmt_f64(i as f64 / f.m as f64), fmt_f64(v)]);
        }
    }
    write_atomic(&spec.out_dir.join("fields.csv"), table.into_string().as_bytes())?;
    manifest.add_output(&spec.out_dir, "fields.csv")?;
    let traj = match traj {
        Some(t) => Some(t),
        None => fep_core::stefan::extract_interfaces(&fields, 1e-3).ok(),
    };
    if let Some(traj) = traj {
        let mut table = CsvTable::new("time,u_minus,u_plus,merged");
        for s in &traj.states {
            table.row(&[fmt_f64(s.time), fmt_f64(s.u_minus), fmt_f64(s.u_plus), s.merged.to_string()]);
        }
        write_atomic(&spec.out_dir.join("interfaces.csv"), table.into_string().as_bytes())?;
        manifest.add_output(&spec.out_dir, "interfaces.csv")?;
    }
    manifest.complete = true;
    manifest.write(&spec.out_dir)?;
    println!("pde: {} fields written to {}", fields.len(), spec.out_dir.display());
    Ok(EXIT_OK)
}

fn cmd_sample(args: RunArgs) -> Result<i32> {
    let mut spec: SampleSpec = load_spec(&args.config)?;
    if let Some(seed) = args.seed {
        match &mut spec {
            SampleSpec::MuN { base_seed, .. }
            | SampleSpec::Gcm { base_seed, .. }
            | SampleSpec::Subcritical { base_seed, .. }
            | SampleSpec::NuAlpha { base_seed, .. } => *base_seed = seed,
        }
    }
    let (lines, out): (Vec<String>, PathBuf) = match &spec {
        SampleSpec::MuN { profile, n, count, base_seed, out } => {
            profile.validate().map_err(|e| anyhow::anyhow!("profile: {e}"))?;
            let lines = (0..*count)
                .map(|i| {
                    sample_mu_n(profile, *n, derive_seed(*base_seed, i as u64))
                        .map(|c| c.to_text())
                        .map_err(|e| anyhow::anyhow!("{e}"))
                })
                .collect::<Result<_>>()?;
            (lines, out.clone())
        }
        SampleSpec::Gcm { rho, length, count, base_seed, out } => {
            let lines = (0..*count)
                .map(|i| {
                    sample_gcm(*rho, *length, derive_seed(*base_seed, i as u64))
                        .map(|c| c.to_text())
                        .map_err(|e| anyhow::anyhow!("{e}"))
                })
                .collect::<Result<_>>()?;
            (lines, out.clone())
        }
        SampleSpec::Subcritical { rho, n, count, base_seed, out } => {
            let lines = (0..*count)
                .map(|i| {
                    sample_subcritical(*rho, *n, derive_seed(*base_seed, i as u64))
                        .map(|c| c.to_text())
                        .map_err(|e| anyhow::anyhow!("{e}"))
                })
                .collect::<Result<_>>()?;
            (lines, out.clone())
        }
        SampleSpec::NuAlpha { alpha, k, count, base_seed, out } => {
            let lines = (0..*count)
                .map(|i| {
                    sample_nu_alpha(*alpha, *k, derive_seed(*base_seed, i as u64))
                        .map(|c| c.to_text())
                        .map_err(|e| anyhow::anyhow!("{e}"))
                })
                .collect::<Result<_>>()?;
            (lines, out.clone())
        }
    };
    write_atomic(&out, (lines.join("\n") + "\n").as_bytes())?;
    println!("sample: {} configurations written to {}", lines.len(), out.display());
    Ok(EXIT_OK)
}

fn cmd_experiment(args: RunArgs) -> Result<i32> {
    let mut spec: ExperimentSpec = load_spec(&args.config)?;
    if let Some(seed) = args.seed {
        spec.base_seed = seed;
    }
    if let Some(out) = args.out {
        spec.out_dir = out;
    }
    spec.validate()?;
    let pool = make_pool(worker_count(args.workers));
    let started = Instant::now();

    let (pass, summary, verdict_detail) = pool.install(|| run_experiment(&spec));

    std::fs::create_dir_all(&spec.out_dir)?;
    write_atomic(&spec.out_dir.join("summary.csv"), summary.as_bytes())?;
    let verdict = serde_json::json!({
        "kind": spec.kind.to_string(),
        "pass": pass,
        "detail": verdict_detail,
        "wall_ms": started.elapsed().as_millis() as u64,
    });
    write_atomic(&spec.out_dir.join("verdict.json"), serde_json::to_string_pretty(&verdict)?.as_bytes())?;
    let mut manifest = RunManifest::new("experiment", spec_hash(&spec), spec.base_seed, vec![]);
    manifest.add_output(&spec.out_dir, "summary.csv")?;
    manifest.add_output(&spec.out_dir, "verdict.json")?;
    manifest.complete = true;
    manifest.write(&spec.out_dir)?;

    println!("experiment {}: {}", spec.kind, if pass { "PASS" } else { "FAIL" });
    println!("{verdict_detail}");
    Ok(if pass { EXIT_OK } else { EXIT_INVARIANT })
}

fn run_experiment(spec: &ExperimentSpec) -> (bool, String, String) {
    match spec.kind {
        ExperimentKind::Hydro => {
            let sizes: Vec<(usize, usize)> = spec.n.iter().map(|&n| (n, spec.replicas)).collect();
            let out = run_hydro(&spec.profile, &sizes, spec.m, spec.time, spec.base_seed);
            let mut table = CsvTable::new("n,mean_l1,per_seed_l1");
            for (n, mean, per) in &out.rows {
                table.row(&[
                    n.to_string(),
                    fmt_f64(*mean),
                    per.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(";"),
                ]);
            }
            let detail = format!(
                "monotone={} final_l1={:.4} (threshold {})",
                out.monotone,
                out.final_l1,
                experiments::thresholds::HYDRO_L1_MAX
            );
            (out.pass, table.into_string(), detail)
        }
        ExperimentKind::Fronts => {
            let n = *spec.n.last().expect("validated");
            let out = run_fronts(&spec.profile, n, spec.replicas, spec.m, spec.time, spec.base_seed);
            let mut table = CsvTable::new("n,mean_error,compared,undefined");
            table.row(&[
                n.to_string(),
                fmt_f64(out.mean_error),
                out.compared.to_string(),
                out.undefined.to_string(),
            ]);
            let detail = format!(
                "mean_error={:.4} compared={} undefined={}",
                out.mean_error, out.compared, out.undefined
            );
            (out.pass, table.into_string(), detail)
        }
        ExperimentKind::Hitting => {
            let n = *spec.n.last().expect("validated");
            let out = run_hitting(&spec.profile, n, spec.replicas, spec.base_seed, 0.25);
            let mut table = CsvTable::new("replica,hit_time");
            for (r, h) in out.hit_times.iter().enumerate() {
                table.row(&[r.to_string(), h.map_or("inf".into(), fmt_f64)]);
            }
            let detail = format!(
                "fraction={:.3} wilson95=[{:.3},{:.3}] t_N={:.4}",
                out.fraction, out.wilson.0, out.wilson.1, out.t_n
            );
            (out.pass, table.into_string(), detail)
        }
        ExperimentKind::Oneblock => {
            let n = *spec.n.last().expect("validated");
            let out = run_oneblock(n, 0.75, &spec.blocks, spec.replicas, spec.base_seed);
            let mut table = CsvTable::new("ell,statistic");
            for (ell, v) in &out.values {
                table.row(&[ell.to_string(), fmt_f64(*v)]);
            }
            let detail = format!("strictly_decreasing={}", out.strictly_decreasing);
            (out.pass, table.into_string(), detail)
        }
        ExperimentKind::Typicality => {
            let n = *spec.n.last().expect("validated");
            let out = run_typicality(&spec.profile, n, spec.replicas, spec.base_seed);
            let mut table = CsvTable::new("sample,k0,in_window,max_deviation,density_ok,witness_ok");
            for (i, s) in out.samples.iter().enumerate() {
                table.row(&[
                    i.to_string(),
                    s.k0.to_string(),
                    s.in_window.to_string(),
                    fmt_f64(s.max_deviation),
                    s.density_ok.to_string(),
                    s.witness_ok.to_string(),
                ]);
            }
            let detail = format!(
                "all={:.3} in_window={:.3} deviation={:.3} density={:.3} witness={:.3}",
                out.fraction_all,
                out.fraction_in_window,
                out.fraction_deviation,
                out.fraction_density,
                out.fraction_witness
            );
            (out.pass, table.into_string(), detail)
        }
    }
}

fn cmd_verify(suite: &str) -> Result<i32> {
    anyhow::ensure!(
        matches!(suite, "exact" | "property" | "all"),
        "unknown suite {suite:?}; expected exact, property or all"
    );
    let (checks, pass) = fep_harness::verify::run_suite(suite);
    for c in &checks {
        let status = if c.pass { "ok  " } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{status} {}", c.name);
        } else {
            println!("{status} {} — {}", c.name, c.detail);
        }
    }
    println!("verify[{suite}]: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_INVARIANT })
}
