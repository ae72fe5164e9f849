//! Decoding graphs and the pipeline that produces them: a toy proximity
//! verifier, its uniquely-decodable decoder, the expander-based two-query
//! decoding graph, degree reduction, vertex padding, and the de Bruijn
//! embedding, plus the subspace-based decoder over linear decoding graphs.

pub mod build;
pub mod circuit;
pub mod edecoder;
pub mod embed;
pub mod pad;
pub mod pcpp;

use crate::error::Error;
use circuit::Circuit;
use std::sync::Arc;

/// Symbol of the witness alphabet Gamma = {0,1}^u, packed little-endian.
pub type GammaSym = u64;

/// Vertex label. Small graphs use single-word labels; embedded graphs use
/// one word per routing slot.
pub type Label = Vec<u64>;

/// Per-edge decoding circuit: maps the two endpoint labels to a witness
/// symbol or a rejection.
pub type PsiFn = Arc<dyn Fn(&[u64], &[u64]) -> Option<GammaSym> + Send + Sync>;

/// Vertex-decoding witness: a total map from the tail label to the symbol
/// the edge decodes whenever it accepts.
pub type DecodeFn = Arc<dyn Fn(&[u64]) -> GammaSym + Send + Sync>;

#[derive(Clone)]
pub struct DecodingEdge {
    pub u: usize,
    pub v: usize,
    /// Witness index this edge decodes.
    pub k: usize,
    pub psi: PsiFn,
    /// Present on vertex-decoding graphs.
    pub f: Option<DecodeFn>,
}

/// A directed constraint graph whose edges decode indexed symbols of a
/// witness for the input circuit.
#[derive(Clone)]
pub struct DecodingGraph {
    pub circuit: Arc<Circuit>,
    /// Words per label.
    pub label_width: usize,
    /// log2 of the label alphabet size.
    pub alphabet_bits: u32,
    pub vertex_count: usize,
    pub edges: Vec<DecodingEdge>,
    /// All edges carry a vertex-decoding witness and every vertex has an
    /// outgoing edge.
    pub vertex_decoding: bool,
}

/// Assignment of labels to the vertices of a decoding graph.
pub type DecAssignment = Vec<Label>;

/// Exact error and rejection probabilities of an assignment against a
/// witness, under the decoding distribution (uniform index, then uniform
/// edge among those decoding it).
pub fn eval_decoding(
    g: &DecodingGraph,
    pi: &DecAssignment,
    x: &[GammaSym],
) -> Result<(f64, f64), Error> {
    let t = g.circuit.t;
    let counts = index_counts(g)?;
    let mut err = 0.0;
    let mut reject = 0.0;
    for e in &g.edges {
        let w = 1.0 / (t as f64 * counts[e.k] as f64);
        match (e.psi)(&pi[e.u], &pi[e.v]) {
            None => reject += w,
            Some(sym) => {
                if sym != x[e.k] {
                    err += w;
                }
            }
        }
    }
    Ok((err, reject))
}

fn index_counts(g: &DecodingGraph) -> Result<Vec<u64>, Error> {
    let t = g.circuit.t;
    let mut counts = vec![0u64; t];
    for e in &g.edges {
        counts[e.k] += 1;
    }
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyIndexClass(k));
    }
    Ok(counts)
}

/// Minimal decoding error over all satisfying assignments of the input
/// circuit, with a minimizer.
pub fn decoding_error(
    g: &DecodingGraph,
    pi: &DecAssignment,
    budget: &crate::budget::Budget,
) -> Result<(f64, Vec<GammaSym>), Error> {
    let sats = g.circuit.satisfying_assignments(budget)?;
    if sats.is_empty() {
        return Err(Error::UnsatisfiableCircuit);
    }
    let mut best = f64::INFINITY;
    let mut best_x = Vec::new();
    for x in sats {
        let (err, _) = eval_decoding(g, pi, &x)?;
        if err < best {
            best = err;
            best_x = x;
        }
    }
    Ok((best, best_x))
}

/// Largest gamma such that every index class has between gamma |E|/t and
/// |E| / (gamma t) edges; equivalently, the similarity factor between the
/// decoding distribution and the uniform edge distribution.
pub fn smoothness(g: &DecodingGraph) -> Result<f64, Error> {
    let counts = index_counts(g)?;
    let t = g.circuit.t as f64;
    let total = g.edges.len() as f64;
    let mut gamma: f64 = 1.0;
    for &c in &counts {
        let c = c as f64;
        gamma = gamma.min(c * t / total).min(total / (c * t));
    }
    Ok(gamma)
}

/// Error and rejection probabilities under the uniform edge distribution
/// (instead of the decoding distribution).
pub fn eval_decoding_uniform(
    g: &DecodingGraph,
    pi: &DecAssignment,
    x: &[GammaSym],
) -> Result<(f64, f64), Error> {
    let mut err = 0.0;
    let mut reject = 0.0;
    let w = 1.0 / g.edges.len() as f64;
    for e in &g.edges {
        match (e.psi)(&pi[e.u], &pi[e.v]) {
            None => reject += w,
            Some(sym) => {
                if sym != x[e.k] {
                    err += w;
                }
            }
        }
    }
    Ok((err, reject))
}

/// Exact check that the decoding distribution is smoothness-similar to the
/// uniform edge distribution: per-edge masses sandwich within the factor, so
/// every event's probability does too.
pub fn check_distribution_similarity(g: &DecodingGraph) -> Result<bool, Error> {
    let gamma = smoothness(g)?;
    let counts = index_counts(g)?;
    let t = g.circuit.t as f64;
    let uniform = 1.0 / g.edges.len() as f64;
    for e in &g.edges {
        let dec = 1.0 / (t * counts[e.k] as f64);
        if dec < gamma * uniform - 1e-12 || dec > uniform / gamma + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Structural regularity check.
pub fn check_regular(g: &DecodingGraph, d: usize) -> Result<(), Error> {
    let mut out = vec![0usize; g.vertex_count];
    let mut inc = vec![0usize; g.vertex_count];
    for e in &g.edges {
        out[e.u] += 1;
        inc[e.v] += 1;
    }
    for v in 0..g.vertex_count {
        if out[v] != d || inc[v] != d {
            return Err(Error::NotRegular {
                vertex: v,
                out_degree: out[v],
                in_degree: inc[v],
                expected: d,
            });
        }
    }
    Ok(())
}

/// Verifies the vertex-decoding properties on an explicit label sample:
/// whenever psi accepts, its output equals f of the tail label, and every
/// vertex has an outgoing edge.
pub fn check_vertex_decoding_on(
    g: &DecodingGraph,
    labels: &[Label],
) -> Result<(), Error> {
    let mut has_out = vec![false; g.vertex_count];
    for e in &g.edges {
        has_out[e.u] = true;
        let f = e
            .f
            .as_ref()
            .ok_or_else(|| Error::Malformed("edge lacks a vertex-decoding witness".into()))?;
        for a in labels {
            for b in labels {
                if let Some(sym) = (e.psi)(a, b) {
                    if sym != f(a) {
                        return Err(Error::Malformed(
                            "psi output disagrees with the vertex-decoding witness".into(),
                        ));
                    }
                }
            }
        }
    }
    if let Some(v) = has_out.iter().position(|&b| !b) {
        return Err(Error::Malformed(format!("vertex {v} has no outgoing edge")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use circuit::{Gate, GateOp};

    fn tiny_graph() -> (DecodingGraph, DecAssignment) {
        // two indices, three edges with counts (2, 1): smoothness 2/3
        let phi = Circuit {
            t: 2,
            u: 1,
            gates: vec![Gate {
                op: GateOp::Const(true),
                inputs: vec![],
            }],
        };
        let psi_eq = |want: GammaSym| -> PsiFn {
            Arc::new(move |a: &[u64], b: &[u64]| {
                if a[0] == b[0] {
                    Some(want)
                } else {
                    None
                }
            })
        };
        let edges = vec![
            DecodingEdge {
                u: 0,
                v: 1,
                k: 0,
                psi: psi_eq(1),
                f: None,
            },
            DecodingEdge {
                u: 1,
                v: 0,
                k: 0,
                psi: psi_eq(1),
                f: None,
            },
            DecodingEdge {
                u: 0,
                v: 0,
                k: 1,
                psi: psi_eq(0),
                f: None,
            },
        ];
        let g = DecodingGraph {
            circuit: Arc::new(phi),
            label_width: 1,
            alphabet_bits: 1,
            vertex_count: 2,
            edges,
            vertex_decoding: false,
        };
        (g, vec![vec![1], vec![1]])
    }

    #[test]
    fn smoothness_from_histogram() {
        let (g, _) = tiny_graph();
        assert!((smoothness(&g).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eval_decoding_probabilities() {
        let (g, pi) = tiny_graph();
        // all edges accept and decode (1, 1, 0); against x = (1, 0): no error
        let (err, rej) = eval_decoding(&g, &pi, &[1, 0]).unwrap();
        assert_eq!((err, rej), (0.0, 0.0));
        // against x = (0, 0): both k=0 edges err, weight 1/2 each over t=2
        let (err, rej) = eval_decoding(&g, &pi, &[0, 0]).unwrap();
        assert!((err - 0.5).abs() < 1e-12);
        assert_eq!(rej, 0.0);
        // mismatched labels make every equality edge report bottom
        let (err, rej) = eval_decoding(&g, &vec![vec![1], vec![0]], &[1, 0]).unwrap();
        assert!(err.abs() < 1e-12);
        assert!((rej - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_index_class_is_an_error() {
        let (mut g, pi) = tiny_graph();
        g.edges.retain(|e| e.k == 0);
        assert!(matches!(
            eval_decoding(&g, &pi, &[1, 0]),
            Err(Error::EmptyIndexClass(1))
        ));
    }

    #[test]
    fn all_rejecting_assignment_scores_zero_error_full_rejection() {
        let (mut g, pi) = tiny_graph();
        for e in g.edges.iter_mut() {
            e.psi = Arc::new(|_a: &[u64], _b: &[u64]| None);
        }
        let (err, rej) = eval_decoding(&g, &pi, &[1, 0]).unwrap();
        assert_eq!((err, rej), (0.0, 1.0));
    }

    #[test]
    fn decoding_error_minimizes_over_satisfying_witnesses() {
        // constant-true circuit on one 1-bit symbol: both witnesses satisfy
        let phi = Circuit {
            t: 1,
            u: 1,
            gates: vec![Gate {
                op: GateOp::Const(true),
                inputs: vec![],
            }],
        };
        let decode_label: PsiFn = Arc::new(|a: &[u64], _b: &[u64]| Some(a[0]));
        let g = DecodingGraph {
            circuit: Arc::new(phi),
            label_width: 1,
            alphabet_bits: 1,
            vertex_count: 2,
            edges: vec![
                DecodingEdge {
                    u: 0,
                    v: 1,
                    k: 0,
                    psi: decode_label.clone(),
                    f: None,
                },
                DecodingEdge {
                    u: 1,
                    v: 0,
                    k: 0,
                    psi: decode_label,
                    f: None,
                },
            ],
            vertex_decoding: false,
        };
        // labels decode (1, 0): error 1/2 against either witness; the
        // minimizer may be either value
        let pi = vec![vec![1u64], vec![0u64]];
        let (err, _x) = decoding_error(&g, &pi, &crate::budget::Budget::default()).unwrap();
        assert!((err - 0.5).abs() < 1e-12);
        // agreeing labels decode one witness exactly
        let pi = vec![vec![1u64], vec![1u64]];
        let (err, x) = decoding_error(&g, &pi, &crate::budget::Budget::default()).unwrap();
        assert_eq!(err, 0.0);
        assert_eq!(x, vec![1]);
    }

    #[test]
    fn similarity_check_matches_smoothness() {
        let (g, pi) = tiny_graph();
        assert!(check_distribution_similarity(&g).unwrap());
        // err/reject under the two distributions sandwich within gamma
        let gamma = smoothness(&g).unwrap();
        let (err_d, rej_d) = eval_decoding(&g, &pi, &[0, 0]).unwrap();
        let (err_u, rej_u) = eval_decoding_uniform(&g, &pi, &[0, 0]).unwrap();
        for (d, u) in [(err_d, err_u), (rej_d, rej_u)] {
            assert!(d >= gamma * u - 1e-12 && d <= u / gamma + 1e-12);
        }
    }
}
