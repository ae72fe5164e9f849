//! File formats: constraint graphs and circuits are the core serde types;
//! assignments are JSON objects mapping vertex ids to symbols.

use anyhow::Context;
use pcp_forge_core::decoding::circuit::Circuit;
use pcp_forge_core::graph::ConstraintGraph;
use std::collections::BTreeMap;
use std::path::Path;

pub fn read_graph(path: &Path) -> anyhow::Result<ConstraintGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading graph file {}", path.display()))?;
    serde_json::from_str(&text).context("parsing graph JSON")
}

pub fn write_graph(path: &Path, g: &ConstraintGraph) -> anyhow::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(g)?)?;
    Ok(())
}

pub fn read_circuit(path: &Path) -> anyhow::Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading circuit file {}", path.display()))?;
    serde_json::from_str(&text).context("parsing circuit JSON")
}

pub fn write_circuit(path: &Path, c: &Circuit) -> anyhow::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(c)?)?;
    Ok(())
}

/// Assignments serialize as {"vertex": symbol} objects.
pub fn read_assignment(path: &Path, vertex_count: usize) -> anyhow::Result<Vec<u64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading assignment file {}", path.display()))?;
    let map: BTreeMap<String, u64> = serde_json::from_str(&text).context("parsing assignment")?;
    let mut out = vec![0u64; vertex_count];
    for (k, v) in map {
        let idx: usize = k.parse().context("assignment keys must be vertex ids")?;
        if idx >= vertex_count {
            anyhow::bail!("assignment labels vertex {idx}, graph has {vertex_count}");
        }
        out[idx] = v;
    }
    Ok(out)
}

pub fn write_assignment(path: &Path, pi: &[u64]) -> anyhow::Result<()> {
    let map: BTreeMap<String, u64> = pi
        .iter()
        .enumerate()
        .map(|(i, &v)| (i.to_string(), v))
        .collect();
    std::fs::write(path, serde_json::to_string_pretty(&map)?)?;
    Ok(())
}
