//! Expander-replacement degree reduction.
//!
//! Every vertex becomes a cloud with one copy per edge incidence; the copies
//! are tied together with equality constraints along expander edges, and each
//! original edge runs between its two incidence copies (with its transpose
//! added in the opposite direction so in- and out-degrees match). The output
//! has 2n vertices for n input edges and is (d0+1)-regular.

use super::expander::{ExpanderCache, DEFAULT_DEGREE, DEFAULT_THRESHOLD};
use super::{Assignment, Constraint, ConstraintGraph};
use crate::error::Error;

/// Result of degree reduction, with the cloud layout needed to lift
/// assignments.
#[derive(Debug, Clone)]
pub struct DegreeReduced {
    pub graph: ConstraintGraph,
    /// Regularity of the output: expander degree + 1.
    pub degree: usize,
    /// copy id -> original vertex (clouds are contiguous ranges).
    pub copy_owner: Vec<usize>,
}

impl DegreeReduced {
    /// Lifts an assignment of the original graph: constant on clouds.
    pub fn lift_assignment(&self, pi: &Assignment) -> Assignment {
        self.copy_owner.iter().map(|&v| pi[v]).collect()
    }
}

/// Reduces an arbitrary constraint graph to a (d0+1)-regular one on
/// 2·|E| vertices, preserving satisfiability (witnessed by the lifter).
pub fn degree_reduce(g: &ConstraintGraph, seed: u64) -> Result<DegreeReduced, Error> {
    degree_reduce_with(g, DEFAULT_DEGREE, DEFAULT_THRESHOLD, seed)
}

pub fn degree_reduce_with(
    g: &ConstraintGraph,
    expander_degree: usize,
    threshold: f64,
    seed: u64,
) -> Result<DegreeReduced, Error> {
    if g.edges.is_empty() {
        return Err(Error::Precondition(
            "degree reduction needs a nonempty graph".into(),
        ));
    }
    let n = g.edges.len();
    // copies: 2i is the out-incidence of edge i, 2i+1 its in-incidence
    let mut copy_owner = vec![0usize; 2 * n];
    let mut clouds: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count];
    for (i, e) in g.edges.iter().enumerate() {
        copy_owner[2 * i] = e.u;
        copy_owner[2 * i + 1] = e.v;
        clouds[e.u].push(2 * i);
        clouds[e.v].push(2 * i + 1);
    }

    let mut out = ConstraintGraph::new(g.alphabet_size, 2 * n);
    for (i, e) in g.edges.iter().enumerate() {
        out.add_edge(2 * i, 2 * i + 1, e.constraint.clone());
        out.add_edge(
            2 * i + 1,
            2 * i,
            Constraint::Transpose(Box::new(e.constraint.clone())),
        );
    }
    let mut expanders = ExpanderCache::new(expander_degree, threshold, seed);
    for cloud in clouds.iter() {
        if cloud.is_empty() {
            continue;
        }
        let spec = expanders.get(cloud.len())?;
        for &(a, b) in &spec.edges {
            out.add_edge(cloud[a], cloud[b], Constraint::Equality);
            out.add_edge(cloud[b], cloud[a], Constraint::Equality);
        }
    }
    let degree = expander_degree + 1;
    out.check_regular(degree)?;
    Ok(DegreeReduced {
        graph: out,
        degree,
        copy_owner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::budget::Budget;
    use crate::graph::{cycle_inequality_instance, planted_instance};

    #[test]
    fn output_shape_matches_quoted_parameters() {
        let g = cycle_inequality_instance();
        let reduced = degree_reduce(&g, 5).unwrap();
        assert_eq!(reduced.graph.vertex_count, 2 * g.size());
        assert_eq!(reduced.graph.size(), 2 * reduced.degree * g.size());
        reduced.graph.check_regular(reduced.degree).unwrap();
    }

    #[test]
    fn satisfying_assignments_lift_exactly() {
        for seed in 0..50u64 {
            let mut rng = rng::stream(seed, 1);
            let (g, pi) = planted_instance(6, 10, 2, 1, &mut rng);
            let reduced = degree_reduce(&g, seed).unwrap();
            let lifted = reduced.lift_assignment(&pi);
            assert_eq!(reduced.graph.eval_sat(&lifted).unwrap(), 1.0);
        }
    }

    #[test]
    fn unsatisfiable_graphs_stay_unsatisfiable() {
        let g = cycle_inequality_instance();
        let reduced = degree_reduce(&g, 3).unwrap();
        assert_eq!(reduced.graph.vertex_count, 6);
        // brute force stays cheap: the vertex count, not the degree, drives it
        let (sat, _) = reduced.graph.sat_exact(&Budget::default()).unwrap();
        assert!(sat < 1.0);
        assert!(reduced.graph.decide_satisfiable().is_none());
    }
}
