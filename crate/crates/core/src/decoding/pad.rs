//! Vertex padding: grow a vertex-decoding graph to an exact vertex count by
//! replacing each vertex with copies tied together by expander equality
//! edges; a designated set of vertices gets one extra copy carrying trivial
//! always-decoding self-loops so degrees stay balanced.

use super::{DecAssignment, DecodingEdge, DecodingGraph, GammaSym};
use crate::error::Error;
use crate::graph::expander::ExpanderCache;
use std::sync::Arc;

/// The padded graph plus the copy layout for lifting assignments.
pub struct PaddedGraph {
    pub graph: DecodingGraph,
    /// copy id -> original vertex.
    pub copy_owner: Vec<usize>,
}

/// Pads `g` to exactly `target_vertices` vertices. `g` must be
/// vertex-decoding.
pub fn pad_vertices(
    g: &DecodingGraph,
    target_vertices: usize,
    expander_degree: usize,
    expander_threshold: f64,
    seed: u64,
) -> Result<PaddedGraph, Error> {
    let ell = g.vertex_count;
    if target_vertices < ell {
        return Err(Error::Precondition(format!(
            "cannot pad {ell} vertices down to {target_vertices}"
        )));
    }
    if !g.vertex_decoding {
        return Err(Error::Precondition(
            "padding needs a vertex-decoding graph".into(),
        ));
    }
    let c = target_vertices / ell;
    let z = target_vertices % ell;
    // copy l of vertex v is l*ell + v for l < c; vertices below z get an
    // extra copy at c*ell + v
    let copy_id = |v: usize, l: usize| -> usize {
        if l < c {
            l * ell + v
        } else {
            c * ell + v
        }
    };
    let mut copy_owner = vec![0usize; target_vertices];
    for v in 0..ell {
        for l in 0..c {
            copy_owner[copy_id(v, l)] = v;
        }
        if v < z {
            copy_owner[copy_id(v, c)] = v;
        }
    }

    let mut expanders = ExpanderCache::new(expander_degree, expander_threshold, seed);
    let mut edges: Vec<DecodingEdge> = Vec::new();
    for e in g.edges.iter() {
        let f = e
            .f
            .clone()
            .ok_or_else(|| Error::Malformed("edge lacks a vertex-decoding witness".into()))?;

        // replicated graph edges on the first c copy layers
        for l in 0..c {
            for _ in 0..expander_degree {
                edges.push(DecodingEdge {
                    u: copy_id(e.u, l),
                    v: copy_id(e.v, l),
                    k: e.k,
                    psi: e.psi.clone(),
                    f: Some(f.clone()),
                });
            }
        }

        // trivial always-decoding self-loops keep the extra copy busy
        if e.u < z {
            let f_triv = f.clone();
            let psi_trivial = Arc::new(move |a: &[u64], _b: &[u64]| -> Option<GammaSym> {
                Some(f_triv(a))
            });
            for _ in 0..expander_degree {
                edges.push(DecodingEdge {
                    u: copy_id(e.u, c),
                    v: copy_id(e.u, c),
                    k: e.k,
                    psi: psi_trivial.clone(),
                    f: Some(f.clone()),
                });
            }
        }

        // equality consistency over the copies of the tail, one expander per
        // graph edge
        let cloud: Vec<usize> = (0..if e.u < z { c + 1 } else { c })
            .map(|l| copy_id(e.u, l))
            .collect();
        let spec = expanders.get(cloud.len())?;
        let f_eq = f.clone();
        let psi_eq = Arc::new(move |a: &[u64], b: &[u64]| -> Option<GammaSym> {
            if a == b {
                Some(f_eq(a))
            } else {
                None
            }
        });
        for &(x, y) in &spec.edges {
            for (from, to) in [(cloud[x], cloud[y]), (cloud[y], cloud[x])] {
                edges.push(DecodingEdge {
                    u: from,
                    v: to,
                    k: e.k,
                    psi: psi_eq.clone(),
                    f: Some(f.clone()),
                });
            }
        }
    }

    let graph = DecodingGraph {
        circuit: g.circuit.clone(),
        label_width: g.label_width,
        alphabet_bits: g.alphabet_bits,
        vertex_count: target_vertices,
        edges,
        vertex_decoding: true,
    };
    Ok(PaddedGraph { graph, copy_owner })
}

impl PaddedGraph {
    /// Lift: constant on copy classes.
    pub fn lift_assignment(&self, pi: &DecAssignment) -> DecAssignment {
        self.copy_owner.iter().map(|&v| pi[v].clone()).collect()
    }
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

    fn base(seed: u64) -> (crate::decoding::build::BuiltDecodingGraph, Vec<GammaSym>) {
        let mut r = rng::stream(seed, 5);
        let (phi, witness) =
            random_satisfiable_circuit(3, 2, 12, &mut r, &Budget::default()).unwrap();
        let d = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
        (
            udpcp_to_vertex_decoding_graph(d, phi, 4, 0.9, seed).unwrap(),
            witness,
        )
    }

    #[test]
    fn exact_vertex_count_and_size_bound() {
        let (built, _) = base(1);
        let d0 = 4;
        let n = built.graph.edges.len();
        for target in [built.graph.vertex_count, 17, 40] {
            let padded = pad_vertices(&built.graph, target, d0, 0.9, 2).unwrap();
            assert_eq!(padded.graph.vertex_count, target);
            let c = target / built.graph.vertex_count;
            assert!(padded.graph.edges.len() <= 2 * (c + 1) * d0 * n);
        }
    }

    #[test]
    fn regular_inputs_stay_regular_and_smoothness_halves_at_worst() {
        let (built, _) = base(2);
        let d0 = 4;
        let d = built.decoder.q * 4; // regularity of the base graph
        let gamma = smoothness(&built.graph).unwrap();
        // same vertex count: copies = 1 per vertex, no extras
        let padded = pad_vertices(&built.graph, built.graph.vertex_count, d0, 0.9, 3).unwrap();
        check_regular(&padded.graph, 2 * d0 * d).unwrap();
        assert!(smoothness(&padded.graph).unwrap() >= gamma / 2.0 - 1e-12);
        // a target that is a multiple also keeps regularity
        let padded = pad_vertices(&built.graph, 2 * built.graph.vertex_count, d0, 0.9, 4).unwrap();
        check_regular(&padded.graph, 2 * d0 * d).unwrap();
        assert!(smoothness(&padded.graph).unwrap() >= gamma / 2.0 - 1e-12);
    }

    #[test]
    fn honest_lift_still_decodes_perfectly() {
        let (built, witness) = base(3);
        let labels = built.honest_assignment(&witness);
        for target in [built.graph.vertex_count, 19, 33] {
            let padded = pad_vertices(&built.graph, target, 4, 0.9, 5).unwrap();
            let lifted = padded.lift_assignment(&labels);
            let (err, rej) = eval_decoding(&padded.graph, &lifted, &witness).unwrap();
            assert_eq!((err, rej), (0.0, 0.0), "target {target}");
        }
    }

    #[test]
    fn shrinking_is_rejected() {
        let (built, _) = base(4);
        assert!(pad_vertices(&built.graph, built.graph.vertex_count - 1, 4, 0.9, 6).is_err());
    }
}
