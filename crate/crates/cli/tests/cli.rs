//! End-to-end tests of the command-line driver: pipelines run, reports are
//! reproducible across runs and worker counts, and failures map to the
//! documented exit codes.

use pcp_forge_core::graph::{Constraint, ConstraintGraph};
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcp-forge"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pcp-forge-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn gen_is_seed_deterministic_and_cycle_matches_brute_force() {
    let a = tmp("det_a.json");
    let b = tmp("det_b.json");
    for out in [&a, &b] {
        let status = bin()
            .args(["gen", "--kind", "planted", "--vertices", "7", "--edges", "11"])
            .args(["--seed", "9", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&a), read(&b), "seeded generation is byte-identical");

    let cycle = tmp("cycle_check.json");
    bin()
        .args(["gen", "--kind", "cycle", "--seed", "1", "--out"])
        .arg(&cycle)
        .status()
        .unwrap();
    let g: ConstraintGraph = serde_json::from_str(&read(&cycle)).unwrap();
    let (sat, _) = g
        .sat_exact(&pcp_forge_core::budget::Budget::default())
        .unwrap();
    assert!((sat - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn gen_and_embed_pipeline() {
    let graph = tmp("planted.json");
    let pi = tmp("planted_pi.json");
    let status = bin()
        .args(["gen", "--kind", "planted", "--vertices", "6", "--edges", "9"])
        .args(["--seed", "5", "--out"])
        .arg(&graph)
        .arg("--assignment-out")
        .arg(&pi)
        .status()
        .unwrap();
    assert!(status.success());

    let report = tmp("embed_report.csv");
    let out = tmp("embedded.json");
    let paths = tmp("paths.json");
    for _ in 0..2 {
        let status = bin()
            .args(["embed", "--lambda", "2", "--m", "5", "--seed", "5"])
            .arg("--graph")
            .arg(&graph)
            .arg("--assignment")
            .arg(&pi)
            .arg("--out")
            .arg(&out)
            .arg("--paths-out")
            .arg(&paths)
            .arg("--report")
            .arg(&report)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let text = read(&report);
    assert!(text.contains("size,64"), "report lists size lambda^(m+1): {text}");
    assert!(text.contains("lifted_eval_sat,1"), "planted lift satisfies: {text}");
    let embedded: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(embedded["debruijn"]["m"], 5);
    assert_eq!(embedded["edges"].as_array().unwrap().len(), 64);
    // routing paths: one system per matching, one path of 2m hops per word
    let paths: serde_json::Value = serde_json::from_str(&read(&paths)).unwrap();
    let systems = paths.as_array().unwrap();
    assert!(!systems.is_empty());
    for system in systems {
        let system = system.as_array().unwrap();
        assert_eq!(system.len(), 32);
        for path in system {
            assert_eq!(path.as_array().unwrap().len(), 11); // 2m + 1 words
        }
    }
}

#[test]
fn dp_reports_are_worker_independent() {
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", "1"].iter().enumerate() {
        let report = tmp(&format!("dp_report_{i}.csv"));
        let status = bin()
            .args(["dp", "--test", "p", "--q", "2", "--m", "4", "--d0", "1", "--d1", "2"])
            .args(["--assignment", "honest-random", "--corrupt", "point_noise:0.2"])
            .args(["--trials", "20000", "--seed", "7", "--workers", workers])
            .arg("--report")
            .arg(&report)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(read(&report));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn derand_runs_on_a_linear_graph_file() {
    // the shift graph over F_2^4 with equality constraints: linear structure
    // with a constant satisfying assignment
    let db = pcp_forge_core::debruijn::DeBruijn::new(2, 4);
    let mut g = ConstraintGraph::new(2, db.vertex_count());
    for u in 0..db.vertex_count() {
        for v in db.successors(u) {
            g.add_edge(u, v, Constraint::Equality);
        }
    }
    let graph = tmp("shift.json");
    std::fs::write(&graph, serde_json::to_string(&g).unwrap()).unwrap();
    let assignment = tmp("shift_pi.json");
    let pi = vec![0u64; db.vertex_count()];
    let map: std::collections::BTreeMap<String, u64> = pi
        .iter()
        .enumerate()
        .map(|(i, &v)| (i.to_string(), v))
        .collect();
    std::fs::write(&assignment, serde_json::to_string(&map).unwrap()).unwrap();

    let report = tmp("derand_report.csv");
    let status = bin()
        .args(["derand", "--q", "2", "--d0", "1", "--d1", "2", "--trials", "2000"])
        .args(["--seed", "3", "--exact"])
        .arg("--graph")
        .arg(&graph)
        .arg("--assignment")
        .arg(format!("honest:{}", assignment.display()))
        .arg("--report")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&report);
    assert!(text.contains("e_test,"), "estimate row present: {text}");
    let estimate_row = text
        .lines()
        .find(|l| l.starts_with("e_test,"))
        .unwrap()
        .to_string();
    assert!(estimate_row.contains(",1,"), "honest acceptance 1.0: {estimate_row}");
    assert!(text.contains("exact_acceptance"), "{text}");
    assert!(text.contains("materialized_sat"), "{text}");
}

#[test]
fn decode_pipeline_runs() {
    let circuit = tmp("circuit.json");
    let status = bin()
        .args(["gen-circuit", "--t", "2", "--u", "1", "--gates", "8", "--seed", "2"])
        .arg("--out")
        .arg(&circuit)
        .status()
        .unwrap();
    assert!(status.success());

    let report = tmp("decode_report.csv");
    let status = bin()
        .args(["decode-pipeline", "--lambda", "16", "--m", "2"])
        .args(["--expander-degree", "2", "--expander-threshold", "1.0"])
        .args(["--d0", "1", "--d1", "2", "--trials", "300", "--seed", "11"])
        .arg("--circuit")
        .arg(&circuit)
        .arg("--report")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&report);
    assert!(text.contains("embedded,vertices=256;size=4096"), "{text}");
    assert!(text.contains("err=0;reject=0"), "{text}");
    assert!(text.contains("edecoder_honest_decode_rate"), "{text}");
    let rate_row = text
        .lines()
        .find(|l| l.starts_with("edecoder_honest_decode_rate"))
        .unwrap();
    assert!(rate_row.contains(",1,") || rate_row.ends_with(",1"), "{rate_row}");
}

#[test]
fn verify_passes_on_clean_checkout() {
    let output = bin().args(["verify", "--seed", "5"]).output().unwrap();
    assert!(
        output.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("all checks passed"));
}

#[test]
fn exit_codes_follow_the_contract() {
    // usage error: unknown flag
    let status = bin().args(["gen", "--bogus"]).status().unwrap();
    assert_eq!(status.code(), Some(1));

    // precondition: capacity too small for the embedding
    let graph = tmp("cycle.json");
    bin()
        .args(["gen", "--kind", "cycle", "--seed", "1", "--out"])
        .arg(&graph)
        .status()
        .unwrap();
    let report = tmp("embed_fail.csv");
    let output = bin()
        .args(["embed", "--lambda", "2", "--m", "2", "--seed", "1"])
        .arg("--graph")
        .arg(&graph)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert_eq!(err.lines().count(), 1, "single-line error: {err}");
    assert!(err.starts_with("error: "));

    // malformed input file
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let output = bin()
        .args(["embed", "--lambda", "2", "--m", "3", "--seed", "1"])
        .arg("--graph")
        .arg(&bad)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
