//! Run manifests: provenance for every ensemble run.
//!
//! The manifest is written before the long run starts (so a crash leaves
//! an identifiable record plus per-replica outputs for resumption) and
//! finalized with metrics and output digests afterwards.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::spec::hex_string;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplicaMetrics {
    pub replica: usize,
    pub seed: u64,
    pub events: u64,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub spec_hash: String,
    pub code_version: String,
    pub base_seed: u64,
    pub replica_seeds: Vec<u64>,
    pub complete: bool,
    #[serde(default)]
    pub metrics: Vec<ReplicaMetrics>,
    #[serde(default)]
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, spec_hash: String, base_seed: u64, replica_seeds: Vec<u64>) -> Self {
        RunManifest {
            schema_version: crate::spec::SCHEMA_VERSION,
            command: command.to_string(),
            spec_hash,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            base_seed,
            replica_seeds,
            complete: false,
            metrics: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn path(out_dir: &Path) -> PathBuf {
        out_dir.join("manifest.json")
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        fs::create_dir_all(out_dir)?;
        let path = Self::path(out_dir);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        fs::rename(&tmp, &path).context("finalizing manifest")?;
        Ok(())
    }

    /// Record the digest of a finished output file.
    pub fn add_output(&mut self, out_dir: &Path, rel: &str) -> Result<()> {
        let digest = file_digest(&out_dir.join(rel))?;
        self.outputs.push(OutputDigest { path: rel.to_string(), sha256: digest });
        Ok(())
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let mut file =
        fs::File::open(path).with_context(|| format!("digesting {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

/// Atomic write: temp file in the same directory, then rename. A file that
/// exists is therefore complete, which is what replica resumption checks.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrip_and_digest() {
        let dir = std::env::temp_dir().join(format!("fep-manifest-{}", std::process::id()));
        let mut m = RunManifest::new("test", "abc".into(), 7, vec![1, 2, 3]);
        m.write(&dir).unwrap();
        write_atomic(&dir.join("data.csv"), b"a,b\n1,2\n").unwrap();
        m.add_output(&dir, "data.csv").unwrap();
        m.complete = true;
        m.write(&dir).unwrap();
        let text = fs::read_to_string(RunManifest::path(&dir)).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert!(back.complete);
        assert_eq!(back.outputs.len(), 1);
        assert_eq!(back.outputs[0].sha256.len(), 64);
        fs::remove_dir_all(&dir).ok();
    }
}
