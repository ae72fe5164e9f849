//! Run manifests: everything needed to re-run a command bit-identically.
//!
//! The deterministic core (command, parameters, seed, tool version, input
//! hashes) is embedded into every report; wall-clock timestamps live only in
//! the optional manifest sidecar so reports stay byte-identical across
//! re-runs.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub input_hashes: BTreeMap<String, String>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            params: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_hashes: BTreeMap::new(),
            started_unix: now(),
            finished_unix: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn hash_input(&mut self, label: &str, path: &Path) -> anyhow::Result<&mut Self> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.input_hashes
            .insert(label.to_string(), format!("{:x}", hasher.finalize()));
        Ok(self)
    }

    pub fn finish(&mut self) {
        self.finished_unix = now();
    }

    /// The reproducibility-relevant fields, serialized canonically; this is
    /// what reports embed.
    pub fn deterministic_json(&self) -> String {
        #[derive(Serialize)]
        struct Core<'a> {
            command: &'a str,
            params: &'a BTreeMap<String, String>,
            seed: u64,
            tool_version: &'a str,
            input_hashes: &'a BTreeMap<String, String>,
        }
        serde_json::to_string(&Core {
            command: &self.command,
            params: &self.params,
            seed: self.seed,
            tool_version: &self.tool_version,
            input_hashes: &self.input_hashes,
        })
        .expect("manifest serializes")
    }

    pub fn write_full(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes a CSV report: a manifest comment line, a header, then rows.
pub fn write_report(
    path: &Path,
    manifest: &RunManifest,
    header: &str,
    rows: &[String],
) -> anyhow::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# manifest: {}\n", manifest.deterministic_json()));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
