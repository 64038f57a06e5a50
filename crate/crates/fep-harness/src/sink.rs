//! Snapshot sinks: append-only CSV or binary streams per trajectory.

use std::io::Write;

use anyhow::Result;

use fep_core::config::ExclusionConfig;
use fep_core::dynamics::Trajectory;

/// CSV rows `replica,time,config` with the compact text form.
pub fn trajectory_to_csv(replica: usize, traj: &Trajectory<ExclusionConfig>) -> String {
    let mut out = String::from("replica,time,config\n");
    for (t, snap) in &traj.snapshots {
        out.push_str(&format!("{replica},{t:.9},{}\n", snap.to_text()));
    }
    out
}

const BINARY_MAGIC: &[u8; 4] = b"FEPS";

/// Binary stream: magic, version, then `f64` time followed by the
/// length-prefixed bit-packed payload per snapshot.
pub fn trajectory_to_binary(traj: &Trajectory<ExclusionConfig>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&1u32.to_le_bytes());
    for (t, snap) in &traj.snapshots {
        out.extend_from_slice(&t.to_le_bytes());
        out.extend_from_slice(&snap.to_bytes());
    }
    out
}

/// Parse a binary snapshot stream back into `(time, config)` pairs.
pub fn binary_to_snapshots(bytes: &[u8]) -> Result<Vec<(f64, ExclusionConfig)>> {
    anyhow::ensure!(bytes.len() >= 8 && &bytes[..4] == BINARY_MAGIC, "bad snapshot stream header");
    let mut pos = 8usize;
    let mut out = Vec::new();
    while pos < bytes.len() {
        anyhow::ensure!(bytes.len() >= pos + 16, "truncated snapshot stream");
        let t = f64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap());
        pos += 8;
        let n = u64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap()) as usize;
        let payload = 8 + n.div_ceil(8);
        anyhow::ensure!(bytes.len() >= pos + payload, "truncated snapshot payload");
        let cfg = ExclusionConfig::from_bytes(&bytes[pos..pos + payload])
            .map_err(|e| anyhow::anyhow!("snapshot payload: {e}"))?;
        pos += payload;
        out.push((t, cfg));
    }
    Ok(out)
}

/// Simple CSV table writer with deterministic float formatting.
pub struct CsvTable {
    buf: String,
}

impl CsvTable {
    pub fn new(header: &str) -> Self {
        CsvTable { buf: format!("{header}\n") }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.buf.as_bytes())?;
        Ok(())
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.9e}")
}
