//! Experiment descriptions loaded from TOML (human-edited) or JSON
//! (programmatic); the format is keyed by file extension.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fep_core::measures::ProfileSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hydro,
    Fronts,
    Hitting,
    Oneblock,
    Typicality,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ExperimentKind::Hydro => "hydro",
            ExperimentKind::Fronts => "fronts",
            ExperimentKind::Hitting => "hitting",
            ExperimentKind::Oneblock => "oneblock",
            ExperimentKind::Typicality => "typicality",
        };
        write!(f, "{name}")
    }
}

fn default_m() -> usize {
    512
}

fn default_time() -> f64 {
    0.05
}

fn default_blocks() -> Vec<usize> {
    vec![8, 16, 32, 64]
}

/// One canned experiment: profile, sizes, times, replication and output.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub profile: ProfileSpec,
    /// Exclusion sizes (one per sweep point).
    pub n: Vec<usize>,
    /// PDE grid for the macroscopic reference.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Observation time for hydro/fronts.
    #[serde(default = "default_time")]
    pub time: f64,
    /// Block radii for the one-block sweep.
    #[serde(default = "default_blocks")]
    pub blocks: Vec<usize>,
    pub replicas: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {}", self.schema_version);
        }
        if self.n.is_empty() || self.replicas == 0 {
            bail!("need at least one size and one replica");
        }
        self.profile.validate().map_err(|e| anyhow::anyhow!("profile: {e}"))?;
        Ok(())
    }
}

/// Plain simulation run (wraps the exclusion simulator).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub schema_version: u32,
    pub profile: ProfileSpec,
    pub n: usize,
    pub horizon: f64,
    pub observe: Vec<f64>,
    pub replicas: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    /// `csv` or `binary` snapshot streams.
    #[serde(default)]
    pub format: SnapshotFormat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

/// PDE solve (weak scheme, optionally the classical moving-boundary one).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSpec {
    pub schema_version: u32,
    pub profile: ProfileSpec,
    pub m: usize,
    pub t_end: f64,
    /// Number of equally spaced snapshots (including the final time).
    pub snapshots: usize,
    /// Explicit time step; defaults to half the stability bound.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Run the classical solver with this regularization index instead of
    /// the weak scheme.
    #[serde(default)]
    pub regularization: Option<u32>,
    pub out_dir: PathBuf,
}

/// Measure sampling runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "measure")]
pub enum SampleSpec {
    MuN { profile: ProfileSpec, n: usize, count: usize, base_seed: u64, out: PathBuf },
    Gcm { rho: f64, length: usize, count: usize, base_seed: u64, out: PathBuf },
    Subcritical { rho: f64, n: usize, count: usize, base_seed: u64, out: PathBuf },
    NuAlpha { alpha: f64, k: usize, count: usize, base_seed: u64, out: PathBuf },
}

/// Load a TOML or JSON spec by extension.
pub fn load_spec<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).context("parsing JSON config"),
        _ => toml::from_str(&text).context("parsing TOML config"),
    }
}

/// Canonical content hash of any serializable spec.
pub fn spec_hash<T: Serialize>(spec: &T) -> String {
    let json = serde_json::to_vec(spec).expect("spec serializes");
    let mut hasher = Sha256::new();
    hasher.update(&json);
    hex_string(&hasher.finalize())
}

pub fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
