//! Degree reduction and de Bruijn embedding of decoding graphs.
//!
//! Degree reduction feeds the graph's own two-query decoder back through the
//! expander construction, yielding a (2 d0)-regular vertex-decoding graph
//! with smoothness one. Padding then gives it exactly lambda^m vertices, and
//! the de Bruijn embedding routes its matchings exactly as for constraint
//! graphs; each de Bruijn edge additionally inherits an index and a decoding
//! map from one of the graph edges of its tail, assigned in a balanced way.

use super::pad::{pad_vertices, PaddedGraph};
use super::{DecAssignment, DecodingEdge, DecodingGraph, GammaSym};
use crate::debruijn::routing::{route_permutation, RoutingPaths};
use crate::debruijn::DeBruijn;
use crate::error::Error;
use crate::graph::expander::ExpanderCache;
use crate::graph::matching::matching_decomposition;
use std::sync::Arc;

/// Degree-reduced graph plus the data to lift assignments.
pub struct ReducedDecodingGraph {
    pub graph: DecodingGraph,
    /// Regularity of the output: 2 * expander_degree.
    pub degree: usize,
    /// invocation id -> the parent edge it reads.
    pub invocation_edge: Vec<usize>,
    parent_width: usize,
}

/// Reduces any decoding graph to a (2 d0)-regular vertex-decoding graph with
/// smoothness one and at most max_k |E_k| * t vertices.
pub fn degree_reduce_decoding(
    g: &DecodingGraph,
    expander_degree: usize,
    expander_threshold: f64,
    seed: u64,
) -> Result<ReducedDecodingGraph, Error> {
    let t = g.circuit.t;
    let mut by_index: Vec<Vec<usize>> = vec![Vec::new(); t];
    for (ei, e) in g.edges.iter().enumerate() {
        by_index[e.k].push(ei);
    }
    if let Some(k) = by_index.iter().position(|v| v.is_empty()) {
        return Err(Error::EmptyIndexClass(k));
    }
    let n_invocations_per_k = by_index.iter().map(|v| v.len()).max().unwrap();
    let vertex_count = t * n_invocations_per_k;
    let invocation_id = |k: usize, omega: usize| k * n_invocations_per_k + omega;
    let mut invocation_edge = vec![0usize; vertex_count];
    // occurrences of each parent vertex among invocation queries (two per
    // invocation: tail then head)
    let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.vertex_count];
    for k in 0..t {
        for omega in 0..n_invocations_per_k {
            let ei = by_index[k][omega % by_index[k].len()];
            let id = invocation_id(k, omega);
            invocation_edge[id] = ei;
            occurrences[g.edges[ei].u].push((id, 0));
            occurrences[g.edges[ei].v].push((id, 1));
        }
    }

    let w = g.label_width;
    let mut expanders = ExpanderCache::new(expander_degree, expander_threshold, seed);
    let mut edges: Vec<DecodingEdge> = Vec::new();
    for occ in occurrences.iter() {
        if occ.is_empty() {
            continue;
        }
        let spec = expanders.get(occ.len())?;
        for &(a, b) in &spec.edges {
            for ((v1, j1), (v2, j2)) in [(occ[a], occ[b]), (occ[b], occ[a])] {
                let parent = &g.edges[invocation_edge[v1]];
                let parent_psi = parent.psi.clone();
                let psi = Arc::new(move |a: &[u64], b: &[u64]| -> Option<GammaSym> {
                    if a[j1 * w..(j1 + 1) * w] != b[j2 * w..(j2 + 1) * w] {
                        return None;
                    }
                    parent_psi(&a[..w], &a[w..2 * w])
                });
                let parent_psi_f = parent.psi.clone();
                let f = Arc::new(move |a: &[u64]| -> GammaSym {
                    parent_psi_f(&a[..w], &a[w..2 * w]).unwrap_or(0)
                });
                edges.push(DecodingEdge {
                    u: v1,
                    v: v2,
                    k: parent.k,
                    psi,
                    f: Some(f),
                });
            }
        }
    }

    let graph = DecodingGraph {
        circuit: g.circuit.clone(),
        label_width: 2 * w,
        alphabet_bits: 2 * g.alphabet_bits,
        vertex_count,
        edges,
        vertex_decoding: true,
    };
    Ok(ReducedDecodingGraph {
        graph,
        degree: 2 * expander_degree,
        invocation_edge,
        parent_width: w,
    })
}

impl ReducedDecodingGraph {
    /// Lift: each invocation holds the labels of the two endpoints it reads.
    pub fn lift_assignment(&self, g: &DecodingGraph, pi: &DecAssignment) -> DecAssignment {
        self.invocation_edge
            .iter()
            .map(|&ei| {
                let e = &g.edges[ei];
                let mut label = Vec::with_capacity(2 * self.parent_width);
                label.extend_from_slice(&pi[e.u]);
                label.extend_from_slice(&pi[e.v]);
                label
            })
            .collect()
    }
}

/// A check attached to a directed de Bruijn edge of the embedded graph.
#[derive(Debug, Clone)]
enum DCheck {
    SlotEq {
        i: u32,
        tail_slot: u32,
        head_slot: u32,
    },
    /// Final routing hop: the delivered message and the receiver's own first
    /// slot must not be rejected by the simulated edge.
    Deliver { i: u32, pad_edge: usize },
}

struct EmbedCore {
    db: DeBruijn,
    d: usize,
    l: usize,
    /// words per simulated-graph label
    w: usize,
    checks: Vec<Vec<DCheck>>,
    pad_psis: Vec<super::PsiFn>,
}

impl EmbedCore {
    fn slot_range(&self, i: usize, j: usize) -> std::ops::Range<usize> {
        let start = (i * self.l + j) * self.w;
        start..start + self.w
    }

    fn accepts(&self, id: usize, a: &[u64], b: &[u64]) -> bool {
        // first slots agree across routings at both endpoints
        for lab in [a, b] {
            let first = &lab[self.slot_range(0, 0)];
            for i in 1..self.d {
                if &lab[self.slot_range(i, 0)] != first {
                    return false;
                }
            }
        }
        for c in &self.checks[id] {
            match c {
                DCheck::SlotEq {
                    i,
                    tail_slot,
                    head_slot,
                } => {
                    if a[self.slot_range(*i as usize, *tail_slot as usize)]
                        != b[self.slot_range(*i as usize, *head_slot as usize)]
                    {
                        return false;
                    }
                }
                DCheck::Deliver { i, pad_edge } => {
                    let sent = &a[self.slot_range(*i as usize, self.l - 1)];
                    let own = &b[self.slot_range(*i as usize, 0)];
                    if self.pad_psis[*pad_edge](sent, own).is_none() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The embedded decoding graph and the data needed to lift assignments.
pub struct EmbeddedDecodingGraph {
    pub graph: DecodingGraph,
    pub db: DeBruijn,
    pub d: usize,
    pub l: usize,
    paths: Vec<RoutingPaths>,
    sim_width: usize,
}

impl EmbeddedDecodingGraph {
    /// Honest lift of an assignment of the simulated (padded) graph.
    pub fn lift_assignment(&self, pi: &DecAssignment) -> DecAssignment {
        let width = self.d * self.l * self.sim_width;
        let mut labels = vec![vec![0u64; width]; self.db.vertex_count()];
        for (i, paths) in self.paths.iter().enumerate() {
            for (source, path) in paths.paths.iter().enumerate() {
                for j in 0..self.l {
                    let start = (i * self.l + j) * self.sim_width;
                    labels[path[j]][start..start + self.sim_width]
                        .copy_from_slice(&pi[source]);
                }
            }
        }
        labels
    }
}

/// All three stages of the embedding pipeline.
pub struct DecodingPipeline {
    pub reduced: ReducedDecodingGraph,
    pub padded: PaddedGraph,
    pub embedded: EmbeddedDecodingGraph,
}

/// Embeds a decoding graph onto the de Bruijn graph over an alphabet of size
/// `lambda` with words of length `m`: degree-reduce, pad to lambda^m
/// vertices, then route the matchings.
pub fn embed_decoding(
    g: &DecodingGraph,
    lambda: usize,
    m: usize,
    expander_degree: usize,
    expander_threshold: f64,
    seed: u64,
) -> Result<DecodingPipeline, Error> {
    let d0 = expander_degree;
    if lambda < 4 * d0 * d0 {
        return Err(Error::Precondition(format!(
            "need lambda >= 4 d0^2 = {}",
            4 * d0 * d0
        )));
    }
    let gamma = super::smoothness(g)?;
    let needed = 2.0 * d0 as f64 * g.edges.len() as f64 / gamma;
    let db = DeBruijn::new(lambda, m);
    if (db.vertex_count() as f64) < needed {
        return Err(Error::Precondition(format!(
            "need lambda^m >= 2 d0 n / gamma = {needed}, have {}",
            db.vertex_count()
        )));
    }

    let reduced = degree_reduce_decoding(g, d0, expander_threshold, seed)?;
    let padded = pad_vertices(
        &reduced.graph,
        db.vertex_count(),
        d0,
        expander_threshold,
        seed.wrapping_add(1),
    )?;
    let d = 2 * d0 * reduced.degree; // 4 d0^2
    super::check_regular(&padded.graph, d)?;

    let pad_graph = &padded.graph;
    let edge_pairs: Vec<(usize, usize)> = pad_graph.edges.iter().map(|e| (e.u, e.v)).collect();
    let matchings = matching_decomposition(pad_graph.vertex_count, &edge_pairs, d)?;

    let l = 2 * m;
    let w = pad_graph.label_width;
    let mut checks: Vec<Vec<DCheck>> = vec![Vec::new(); db.edge_count()];
    let mut matched_edge: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut paths_all = Vec::with_capacity(d);
    for matching in &matchings {
        let mut mu: Vec<usize> = (0..db.vertex_count()).collect();
        let mut edge_of = vec![usize::MAX; db.vertex_count()];
        for &ei in matching {
            let (u, v) = edge_pairs[ei];
            mu[u] = v;
            edge_of[u] = ei;
        }
        let paths = route_permutation(&db, &mu)?;
        let i = paths_all.len() as u32;
        for (source, path) in paths.paths.iter().enumerate() {
            for j in 0..l {
                let (x, y) = (path[j], path[j + 1]);
                if j + 1 < l {
                    if let Some(id) = db.edge_id(x, y) {
                        checks[id].push(DCheck::SlotEq {
                            i,
                            tail_slot: j as u32,
                            head_slot: (j + 1) as u32,
                        });
                    } else {
                        let id = db.edge_id(y, x).expect("path step is an edge");
                        checks[id].push(DCheck::SlotEq {
                            i,
                            tail_slot: (j + 1) as u32,
                            head_slot: j as u32,
                        });
                    }
                } else {
                    let id = db.edge_id(x, y).expect("final hop is a forward edge");
                    checks[id].push(DCheck::Deliver {
                        i,
                        pad_edge: edge_of[source],
                    });
                }
            }
        }
        matched_edge.push(edge_of);
        paths_all.push(paths);
    }

    let core = Arc::new(EmbedCore {
        db,
        d,
        l,
        w,
        checks,
        pad_psis: pad_graph.edges.iter().map(|e| e.psi.clone()).collect(),
    });

    // balanced association of the lambda out-edges of each word with its d
    // simulated out-edges, in deterministic order
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); pad_graph.vertex_count];
    for (ei, e) in pad_graph.edges.iter().enumerate() {
        out_edges[e.u].push(ei);
    }
    let mut edges = Vec::with_capacity(db.edge_count());
    for u in 0..db.vertex_count() {
        for beta in 0..lambda {
            let v = db.successor(u, beta);
            let id = db.edge_id(u, v).unwrap();
            let sim = out_edges[u][beta * d / lambda];
            let sim_edge = &pad_graph.edges[sim];
            let sim_f = sim_edge
                .f
                .clone()
                .ok_or_else(|| Error::Malformed("padded graph lost vertex decoding".into()))?;
            let core_psi = Arc::clone(&core);
            let f_psi = sim_f.clone();
            let w_local = w;
            let psi = Arc::new(move |a: &[u64], b: &[u64]| -> Option<GammaSym> {
                if core_psi.accepts(id, a, b) {
                    Some(f_psi(&a[..w_local]))
                } else {
                    None
                }
            });
            let f_wit = sim_f.clone();
            let f = Arc::new(move |a: &[u64]| -> GammaSym { f_wit(&a[..w_local]) });
            edges.push(DecodingEdge {
                u,
                v,
                k: sim_edge.k,
                psi,
                f: Some(f),
            });
        }
    }

    let graph = DecodingGraph {
        circuit: g.circuit.clone(),
        label_width: d * l * w,
        alphabet_bits: (d * l) as u32 * pad_graph.alphabet_bits,
        vertex_count: core.db.vertex_count(),
        edges,
        vertex_decoding: true,
    };
    let embedded = EmbeddedDecodingGraph {
        graph,
        db,
        d,
        l,
        paths: paths_all,
        sim_width: w,
    };
    Ok(DecodingPipeline {
        reduced,
        padded,
        embedded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::budget::Budget;
    use crate::decoding::build::udpcp_to_vertex_decoding_graph;
    use crate::decoding::circuit::random_satisfiable_circuit;
    use crate::decoding::pcpp::{pcpp_to_udpcp, toy_pcpp};
    use crate::decoding::{check_regular, eval_decoding, smoothness};

    #[test]
    fn degree_reduction_shape_and_completeness() {
        let mut r = rng::stream(8, 5);
        let (phi, witness) =
            random_satisfiable_circuit(3, 2, 12, &mut r, &Budget::default()).unwrap();
        let d = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
        let built = udpcp_to_vertex_decoding_graph(d, phi, 4, 0.9, 8).unwrap();
        let reduced = degree_reduce_decoding(&built.graph, 4, 0.9, 9).unwrap();
        check_regular(&reduced.graph, 8).unwrap();
        assert_eq!(smoothness(&reduced.graph).unwrap(), 1.0);
        assert!(reduced.graph.vertex_count <= built.graph.edges.len());
        let labels = built.honest_assignment(&witness);
        let lifted = reduced.lift_assignment(&built.graph, &labels);
        let (err, rej) = eval_decoding(&reduced.graph, &lifted, &witness).unwrap();
        assert_eq!((err, rej), (0.0, 0.0));
    }

    #[test]
    fn full_pipeline_preserves_decoding_at_small_scale() {
        let mut r = rng::stream(9, 5);
        let (phi, witness) =
            random_satisfiable_circuit(2, 1, 8, &mut r, &Budget::default()).unwrap();
        let d = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
        let built = udpcp_to_vertex_decoding_graph(d, phi, 2, 1.0, 10).unwrap();
        // d0 = 2 keeps lambda = 16 feasible for a quick test; the spectral
        // threshold is waived since tiny clouds cannot clear it at degree 2
        let pipeline = embed_decoding(&built.graph, 16, 2, 2, 1.0, 11).unwrap();
        assert_eq!(pipeline.embedded.graph.vertex_count, 16 * 16);
        assert_eq!(pipeline.embedded.graph.edges.len(), 16usize.pow(3));
        let labels = built.honest_assignment(&witness);
        let lifted = pipeline
            .reduced
            .lift_assignment(&built.graph, &labels);
        let padded = pipeline.padded.lift_assignment(&lifted);
        let emb = pipeline.embedded.lift_assignment(&padded);
        let (err, rej) = eval_decoding(&pipeline.embedded.graph, &emb, &witness).unwrap();
        assert_eq!((err, rej), (0.0, 0.0));
        let s = smoothness(&pipeline.embedded.graph).unwrap();
        assert!(s >= 1.0 / (2.0 * 16.0) - 1e-12, "smoothness {s}");
    }
}
