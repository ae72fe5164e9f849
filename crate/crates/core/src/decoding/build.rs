//! From a decoder to a two-query vertex-decoding graph.
//!
//! One vertex per decoder invocation (index, coin tosses), labeled by the
//! full answer tuple of that invocation. For every proof position, an
//! expander over the query occurrences of that position supplies consistency
//! edges; an edge compares the two answer slots it connects and otherwise
//! decodes with the tail's invocation. Every vertex has the same number of
//! occurrences, so the graph is (q d0)-regular with smoothness exactly one.

use super::pcpp::PcpDecoder;
use super::{DecAssignment, DecodingEdge, DecodingGraph, GammaSym, Label};
use crate::error::Error;
use crate::graph::expander::ExpanderCache;
use std::sync::Arc;

/// The constructed graph plus what is needed to lift honest proofs.
pub struct BuiltDecodingGraph {
    pub graph: DecodingGraph,
    pub decoder: Arc<PcpDecoder>,
}

/// Builds the vertex-decoding graph of a decoder for the circuit it targets.
/// `expander_degree` is the consistency-expander degree d0.
pub fn udpcp_to_vertex_decoding_graph(
    decoder: PcpDecoder,
    circuit: super::circuit::Circuit,
    expander_degree: usize,
    expander_threshold: f64,
    seed: u64,
) -> Result<BuiltDecodingGraph, Error> {
    if decoder.q > 63 {
        return Err(Error::Precondition(
            "answer tuples beyond 63 bits are not packable".into(),
        ));
    }
    let decoder = Arc::new(decoder);
    let r_space = decoder.randomness_space() as usize;
    let t = decoder.t;
    let vertex_count = t * r_space;
    let vertex_id = |k: usize, omega: usize| k * r_space + omega;

    // occurrences of each proof position across all invocations
    let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); decoder.ell];
    for k in 0..t {
        for omega in 0..r_space {
            for (j, &pos) in decoder.queries(k, omega as u64).iter().enumerate() {
                occurrences[pos].push((vertex_id(k, omega), j));
            }
        }
    }

    let mut expanders = ExpanderCache::new(expander_degree, expander_threshold, seed);
    let mut edges: Vec<DecodingEdge> = Vec::new();
    for occ in occurrences.iter() {
        if occ.is_empty() {
            continue;
        }
        let spec = expanders.get(occ.len())?;
        for &(a, b) in &spec.edges {
            let (v1, j1) = occ[a];
            let (v2, j2) = occ[b];
            edges.push(consistency_edge(&decoder, r_space, v1, j1, v2, j2));
            edges.push(consistency_edge(&decoder, r_space, v2, j2, v1, j1));
        }
    }

    let graph = DecodingGraph {
        circuit: Arc::new(circuit),
        label_width: 1,
        alphabet_bits: decoder.q as u32,
        vertex_count,
        edges,
        vertex_decoding: true,
    };
    Ok(BuiltDecodingGraph { graph, decoder })
}

fn consistency_edge(
    decoder: &Arc<PcpDecoder>,
    r_space: usize,
    v1: usize,
    j1: usize,
    v2: usize,
    j2: usize,
) -> DecodingEdge {
    let k1 = v1 / r_space;
    let omega1 = (v1 % r_space) as u64;
    let d = Arc::clone(decoder);
    let psi = {
        let d = Arc::clone(&d);
        Arc::new(move |a: &[u64], b: &[u64]| -> Option<GammaSym> {
            if (a[0] >> j1) & 1 != (b[0] >> j2) & 1 {
                return None;
            }
            let answers: Vec<bool> = (0..d.q).map(|j| (a[0] >> j) & 1 == 1).collect();
            d.decode(k1, omega1, &answers).ok().flatten()
        })
    };
    let f = {
        let d = Arc::clone(&d);
        Arc::new(move |a: &[u64]| -> GammaSym {
            // the decoded symbol is the trailing u answer bits, regardless of
            // whether the invocation accepts
            let mut sym = 0u64;
            for j in 0..d.u {
                sym |= ((a[0] >> (d.verifier.q + j)) & 1) << j;
            }
            sym
        })
    };
    DecodingEdge {
        u: v1,
        v: v2,
        k: k1,
        psi,
        f: Some(f),
    }
}

impl BuiltDecodingGraph {
    /// The honest labeling for a witness: each invocation holds its answer
    /// tuple on the honest proof.
    pub fn honest_assignment(&self, x: &[GammaSym]) -> DecAssignment {
        let proof = self.decoder.honest_proof(x);
        let r_space = self.decoder.randomness_space() as usize;
        let mut labels: DecAssignment = Vec::with_capacity(self.graph.vertex_count);
        for k in 0..self.decoder.t {
            for omega in 0..r_space {
                let mut bits = 0u64;
                for (j, &pos) in self.decoder.queries(k, omega as u64).iter().enumerate() {
                    if proof.get(pos).copied().unwrap_or(false) {
                        bits |= 1 << j;
                    }
                }
                labels.push(vec![bits] as Label);
            }
        }
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::budget::Budget;
    use crate::decoding::circuit::random_satisfiable_circuit;
    use crate::decoding::pcpp::{pcpp_to_udpcp, toy_pcpp};
    use crate::decoding::{check_regular, eval_decoding, smoothness};

    fn build(seed: u64) -> (BuiltDecodingGraph, Vec<GammaSym>) {
        let mut r = rng::stream(seed, 3);
        let (phi, witness) =
            random_satisfiable_circuit(3, 2, 12, &mut r, &Budget::default()).unwrap();
        let d = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
        let built = udpcp_to_vertex_decoding_graph(d, phi, 4, 0.9, seed).unwrap();
        (built, witness)
    }

    #[test]
    fn quoted_parameters_hold_exactly() {
        let (built, _) = build(1);
        let g = &built.graph;
        // t * 2^r vertices
        assert_eq!(
            g.vertex_count,
            built.decoder.t * built.decoder.randomness_space() as usize
        );
        // (q d0)-regular
        check_regular(g, built.decoder.q * 4).unwrap();
        // smoothness exactly 1
        assert_eq!(smoothness(g).unwrap(), 1.0);
        assert!(g.vertex_decoding);
    }

    #[test]
    fn honest_assignments_decode_perfectly() {
        for seed in 1..4 {
            let (built, witness) = build(seed);
            let labels = built.honest_assignment(&witness);
            let (err, rej) = eval_decoding(&built.graph, &labels, &witness).unwrap();
            assert_eq!((err, rej), (0.0, 0.0), "seed {seed}");
        }
    }

    #[test]
    fn psi_respects_the_vertex_decoding_witness() {
        let (built, witness) = build(2);
        let labels = built.honest_assignment(&witness);
        crate::decoding::check_vertex_decoding_on(&built.graph, &labels).unwrap();
    }
}
