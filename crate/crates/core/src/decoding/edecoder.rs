//! Decoding graphs with linear structure and the subspace-based decoder over
//! them: pick an edge that decodes the requested index, draw an edge-subspace
//! pair conditioned on containing it, check consistency against a vertex
//! subspace, and decode from the edge's own labels.

use super::GammaSym;
use crate::budget::{Budget, RETRY_CAP};
use crate::derand::{ETestInstance, ProductAnswer, ProductOracle, ProductQuery};
use crate::dp::Sym;
use crate::error::Error;
use crate::field::Field;
use crate::rng::ChaCha8Rng;
use crate::space::{
    edge_left, edge_right, enumerate_subspaces, is_disjoint, point_index, sample_subspace,
    sample_subspace_containing, sample_vector_in, span, subspace_sum, EdgeSpaceView, Side,
    Subspace, Vector,
};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// A vertex-decoding graph over the vertex space F_q^m whose edge set is a
/// linear subspace with full projections. Constraints are planted: an edge
/// accepts exactly the planted labels of its endpoints and then decodes the
/// planted witness symbol of its index. Indices are assigned round-robin
/// over the edge enumeration, so every class has floor or ceil(|E|/t) edges.
pub struct LinearDecodingGraph {
    pub field: Field,
    pub m: usize,
    pub edge_space: EdgeSpaceView,
    pub t: usize,
    pub u: usize,
    pub sigma: u64,
    pub pi_star: Vec<Sym>,
    pub x_star: Vec<GammaSym>,
    edges_by_index: Vec<Vec<Vector>>,
}

impl LinearDecodingGraph {
    /// Builds a toy linear decoding graph with a random edge space of the
    /// given dimension, a random planted proof, and a random witness.
    pub fn random(
        q: u64,
        m: usize,
        dim_e: usize,
        t: usize,
        u: usize,
        sigma: u64,
        seed: u64,
        budget: &Budget,
    ) -> Result<Self, Error> {
        let field = Field::new(q)?;
        let full_edges = Subspace::full(&field, 2 * m);
        let mut r = crate::rng::stream(seed, 33);
        for _ in 0..RETRY_CAP {
            let cand = sample_subspace(&field, dim_e, &full_edges, &mut r)?;
            let view = EdgeSpaceView::new(cand, m)?;
            if view.project_side(&field, Side::Left) != Subspace::full(&field, m)
                || view.project_side(&field, Side::Right) != Subspace::full(&field, m)
            {
                continue;
            }
            let n_vertices = q.pow(m as u32) as usize;
            let pi_star: Vec<Sym> = (0..n_vertices).map(|_| r.gen_range(0..sigma)).collect();
            let x_star: Vec<GammaSym> = (0..t).map(|_| r.gen_range(0..(1u64 << u))).collect();
            let points = view.subspace.enumerate_points(&field, budget)?;
            if points.len() < t {
                return Err(Error::Precondition(
                    "fewer edges than witness indices".into(),
                ));
            }
            let mut edges_by_index = vec![Vec::new(); t];
            for (i, e) in points.into_iter().enumerate() {
                edges_by_index[i % t].push(e);
            }
            return Ok(LinearDecodingGraph {
                field,
                m,
                edge_space: view,
                t,
                u,
                sigma,
                pi_star,
                x_star,
                edges_by_index,
            });
        }
        Err(Error::RetryCapExceeded {
            cap: RETRY_CAP,
            context: "LinearDecodingGraph::random".into(),
        })
    }

    pub fn dim_e(&self) -> usize {
        self.edge_space.subspace.dim()
    }

    pub fn edge_count(&self) -> usize {
        self.edges_by_index.iter().map(|v| v.len()).sum()
    }

    /// Index decoded by the edge at point `e`.
    pub fn k_of(&self, e: &[u32]) -> Option<usize> {
        let idx = self
            .edge_space
            .subspace
            .point_index_of(&self.field, e)? as usize;
        Some(idx % self.t)
    }

    pub fn edges_with_index(&self, k: usize) -> &[Vector] {
        &self.edges_by_index[k]
    }

    /// Per-edge decoding map: accepts exactly the planted endpoint labels.
    pub fn psi(&self, e: &[u32], a: Sym, b: Sym) -> Option<GammaSym> {
        let l = point_index(self.field.order(), edge_left(e, self.m)) as usize;
        let r = point_index(self.field.order(), edge_right(e, self.m)) as usize;
        if a == self.pi_star[l] && b == self.pi_star[r] {
            Some(self.x_star[self.k_of(e)?])
        } else {
            None
        }
    }

    /// Smoothness from the index histogram.
    pub fn smoothness(&self) -> f64 {
        let total = self.edge_count() as f64;
        let t = self.t as f64;
        self.edges_by_index
            .iter()
            .map(|v| {
                let c = v.len() as f64;
                (c * t / total).min(total / (c * t))
            })
            .fold(1.0, f64::min)
    }
}

fn conditions_hold(
    field: &Field,
    m: usize,
    d1: usize,
    f_l: &Subspace,
    f_r: &Subspace,
) -> Result<Option<(Subspace, Subspace, Subspace)>, Error> {
    let f = subspace_sum(field, f_l, f_r)?;
    if f.dim() != 2 * d1 {
        return Ok(None);
    }
    let b_l = EdgeSpaceView::new(f_l.clone(), m)?.project_side(field, Side::Left);
    let b_r = EdgeSpaceView::new(f_r.clone(), m)?.project_side(field, Side::Right);
    if b_l.dim() != d1 || b_r.dim() != d1 || !is_disjoint(field, &b_l, &b_r)? {
        return Ok(None);
    }
    Ok(Some((f, b_l, b_r)))
}

/// Samples a decoder instance for index k: a uniform edge of its class and
/// an edge-subspace pair containing it.
///
/// The pair sampler is constructive: a uniform component f_l determines its
/// complement f_r = e - f_l, each is extended to a uniform d1-subspace
/// around it, and the draw rejects unless the four side conditions hold.
/// Decompositions with a zero component bias the draw slightly; the exact
/// conditional is recovered by enumeration at micro scale.
pub fn sample_edecoder_instance(
    g: &LinearDecodingGraph,
    k: usize,
    d0: usize,
    d1: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vector, ETestInstance), Error> {
    if k >= g.t {
        return Err(Error::Precondition(format!("index {k} out of range", )));
    }
    if g.edges_by_index[k].is_empty() {
        return Err(Error::EmptyIndexClass(k));
    }
    if !(d0 < d1) || 2 * d1 > g.dim_e().min(g.m) {
        return Err(Error::Precondition(
            "need d0 < d1 and 2 d1 <= min(dim E, m)".into(),
        ));
    }
    let field = &g.field;
    let e = g.edges_by_index[k]
        .choose(rng)
        .expect("nonempty class")
        .clone();
    let espace = &g.edge_space.subspace;
    // degenerate decompositions (a zero component) are the only ones that
    // work when e is the zero edge, deflating the acceptance rate by |E|;
    // the cap scales to keep the failure probability negligible
    let cap = RETRY_CAP * g.edge_count().max(1);
    for _ in 0..cap {
        let f_l_vec = sample_vector_in(field, espace, rng);
        let f_r_vec: Vector = f_l_vec
            .iter()
            .zip(&e)
            .map(|(&a, &b)| field.sub(b, a))
            .collect();
        let l_seed = span(field, std::slice::from_ref(&f_l_vec), 2 * g.m)?;
        let r_seed = span(field, std::slice::from_ref(&f_r_vec), 2 * g.m)?;
        if l_seed.dim() > d1 || r_seed.dim() > d1 {
            continue;
        }
        let f_l = sample_subspace_containing(field, d1, &l_seed, espace, rng)?;
        let f_r = sample_subspace_containing(field, d1, &r_seed, espace, rng)?;
        let Some((f, b_l, b_r)) = conditions_hold(field, g.m, d1, &f_l, &f_r)? else {
            continue;
        };
        debug_assert!(f.contains(field, &e));
        let a_l = sample_subspace(field, d0, &b_l, rng)?;
        let a_r = sample_subspace(field, d0, &b_r, rng)?;
        let a = subspace_sum(field, &a_l, &a_r)?;
        return Ok((
            e,
            ETestInstance {
                f_l,
                f_r,
                f,
                b_l,
                b_r,
                a_l,
                a_r,
                a,
            },
        ));
    }
    Err(Error::RetryCapExceeded {
        cap,
        context: "sample_edecoder_instance".into(),
    })
}

/// Outcome of one decoder run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EDecodeOutcome {
    /// None is the rejection output.
    pub output: Option<GammaSym>,
    pub edge_violation: bool,
    pub consistency_violation: bool,
}

/// Runs the decoder: reject if the edge answer violates any edge of F or
/// disagrees with the vertex answer on (A_L, A_R); otherwise decode with the
/// chosen edge's own label pair.
pub fn run_e_decoder(
    g: &LinearDecodingGraph,
    oracle: &ProductOracle,
    e: &Vector,
    inst: &ETestInstance,
    rng: &mut ChaCha8Rng,
) -> Result<EDecodeOutcome, Error> {
    let field = &g.field;
    let ans_f = oracle.query(field, g.m, &ProductQuery::EdgeSpace(inst.f.clone()), rng);
    let ans_a = oracle.query(field, g.m, &ProductQuery::VertexSpace(inst.a.clone()), rng);
    let (pairs, vertex_fn) = match (&ans_f, &ans_a) {
        (ProductAnswer::EdgeFn(p), ProductAnswer::VertexFn(v)) => (p, v),
        _ => {
            return Ok(EDecodeOutcome {
                output: None,
                edge_violation: false,
                consistency_violation: false,
            })
        }
    };
    let edge_pts = inst.f.enumerate_points(field, &Budget::default())?;
    if pairs.len() != edge_pts.len() {
        return Err(Error::MalformedAnswer("edge answer length mismatch".into()));
    }
    let mut edge_violation = false;
    for (pt, (la, lb)) in edge_pts.iter().zip(pairs) {
        if g.psi(pt, *la, *lb).is_none() {
            edge_violation = true;
            break;
        }
    }
    let mut consistency_violation = false;
    if !edge_violation {
        'outer: for (pt, (la, lb)) in edge_pts.iter().zip(pairs) {
            let l = edge_left(pt, g.m);
            if inst.a_l.contains(field, l) {
                let idx = inst.a.point_index_of(field, l).expect("A_L inside A") as usize;
                if vertex_fn.get(idx).copied() != Some(*la) {
                    consistency_violation = true;
                    break 'outer;
                }
            }
            let r = edge_right(pt, g.m);
            if inst.a_r.contains(field, r) {
                let idx = inst.a.point_index_of(field, r).expect("A_R inside A") as usize;
                if vertex_fn.get(idx).copied() != Some(*lb) {
                    consistency_violation = true;
                    break 'outer;
                }
            }
        }
    }
    if edge_violation || consistency_violation {
        return Ok(EDecodeOutcome {
            output: None,
            edge_violation,
            consistency_violation,
        });
    }
    let own = inst
        .f
        .point_index_of(field, e)
        .ok_or_else(|| Error::Malformed("chosen edge not inside F".into()))? as usize;
    let (la, lb) = pairs[own];
    Ok(EDecodeOutcome {
        output: g.psi(e, la, lb),
        edge_violation: false,
        consistency_violation: false,
    })
}

/// Exact conditional distribution of F given the chosen edge: uniform over
/// valid (F_L, F_R) pairs whose sum contains e, marginalized to F.
pub fn exact_conditional_f_marginal(
    g: &LinearDecodingGraph,
    e: &Vector,
    d1: usize,
    budget: &Budget,
) -> Result<BTreeMap<Vec<u8>, f64>, Error> {
    Ok(ConditionalEnumerator::new(g, d1, budget)?.marginal_for(g, e))
}

/// Precomputed list of the F-sums of all valid (F_L, F_R) pairs, for
/// repeated conditional queries.
pub struct ConditionalEnumerator {
    pair_sums: Vec<Subspace>,
}

impl ConditionalEnumerator {
    pub fn new(g: &LinearDecodingGraph, d1: usize, budget: &Budget) -> Result<Self, Error> {
        let field = &g.field;
        let subs = enumerate_subspaces(field, d1, &g.edge_space.subspace, budget)?;
        let mut pair_sums = Vec::new();
        for f_l in &subs {
            for f_r in &subs {
                if let Some((f, _, _)) = conditions_hold(field, g.m, d1, f_l, f_r)? {
                    pair_sums.push(f);
                }
            }
        }
        budget.check(pair_sums.len() as u128)?;
        Ok(ConditionalEnumerator { pair_sums })
    }

    /// The exact conditional F-marginal given the chosen edge: uniform over
    /// valid pairs whose sum contains it, grouped by F.
    pub fn marginal_for(
        &self,
        g: &LinearDecodingGraph,
        e: &Vector,
    ) -> BTreeMap<Vec<u8>, f64> {
        let mut weights: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        let mut total = 0u64;
        for f in &self.pair_sums {
            if f.contains(&g.field, e) {
                *weights.entry(f.canonical_key()).or_insert(0) += 1;
                total += 1;
            }
        }
        weights
            .into_iter()
            .map(|(k, w)| (k, w as f64 / total as f64))
            .collect()
    }
}

/// Exact check of similarity propagation: the joint laws of (edge, F) under
/// the uniform edge distribution and the decoding distribution share the
/// conditional P[F | edge], so they must sandwich each other within the
/// graph's smoothness factor pointwise.
pub fn check_derived_similarity(
    g: &LinearDecodingGraph,
    d1: usize,
    budget: &Budget,
) -> Result<bool, Error> {
    let gamma = g.smoothness();
    let total_edges = g.edge_count() as f64;
    let t = g.t as f64;
    let enumerator = ConditionalEnumerator::new(g, d1, budget)?;
    for k in 0..g.t {
        let class = g.edges_with_index(k);
        for e in class {
            let p_uniform_e = 1.0 / total_edges;
            let p_decoding_e = 1.0 / (t * class.len() as f64);
            let conditional = enumerator.marginal_for(g, e);
            for p_f_given_e in conditional.values() {
                let y1 = p_uniform_e * p_f_given_e;
                let y2 = p_decoding_e * p_f_given_e;
                if y2 < gamma * y1 - 1e-12 || y2 > y1 / gamma + 1e-12 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Total-variation distance between the sampled F-marginal (for a fixed
/// edge) and the exact conditional.
pub fn conditional_sampler_tv(
    g: &LinearDecodingGraph,
    k: usize,
    e: &Vector,
    d0: usize,
    d1: usize,
    samples: usize,
    seed: u64,
    budget: &Budget,
) -> Result<f64, Error> {
    let exact = ConditionalEnumerator::new(g, d1, budget)?.marginal_for(g, e);
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut r = crate::rng::stream(seed, 77);
    let mut drawn = 0usize;
    while drawn < samples {
        // resample until the class draw picks our fixed edge, so the
        // conditional matches the enumeration side exactly
        let (e_got, inst) = sample_edecoder_instance(g, k, d0, d1, &mut r)?;
        if &e_got != e {
            continue;
        }
        *counts.entry(inst.f.canonical_key()).or_insert(0) += 1;
        drawn += 1;
    }
    let mut tv = 0.0;
    let keys: std::collections::BTreeSet<_> = exact
        .keys()
        .chain(counts.keys())
        .cloned()
        .collect();
    for key in keys {
        let p = exact.get(&key).copied().unwrap_or(0.0);
        let q = counts.get(&key).copied().unwrap_or(0) as f64 / samples as f64;
        tv += (p - q).abs();
    }
    Ok(tv / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derand::lift_assignment;

    fn toy() -> LinearDecodingGraph {
        LinearDecodingGraph::random(2, 4, 5, 3, 2, 4, 7, &Budget::default()).unwrap()
    }

    #[test]
    fn planted_graph_shape() {
        let g = toy();
        assert_eq!(g.edge_count(), 32);
        assert_eq!(g.smoothness(), (10.0 * 3.0 / 32.0f64).min(32.0 / (11.0 * 3.0)));
        for k in 0..g.t {
            assert!(!g.edges_with_index(k).is_empty());
        }
    }

    #[test]
    fn instances_contain_their_edge_and_satisfy_invariants() {
        let g = toy();
        let mut r = crate::rng::root(8);
        for trial in 0..200 {
            let k = trial % g.t;
            let (e, inst) = sample_edecoder_instance(&g, k, 1, 2, &mut r).unwrap();
            inst.verify(&g.field, 1, 2).unwrap();
            assert!(inst.f.contains(&g.field, &e));
            assert_eq!(g.k_of(&e), Some(k));
        }
    }

    #[test]
    fn honest_lift_decodes_the_planted_witness() {
        let g = toy();
        let oracle = lift_assignment(g.pi_star.clone());
        let mut r = crate::rng::root(9);
        for trial in 0..500 {
            let k = trial % g.t;
            let (e, inst) = sample_edecoder_instance(&g, k, 1, 2, &mut r).unwrap();
            let out = run_e_decoder(&g, &oracle, &e, &inst, &mut r).unwrap();
            assert_eq!(out.output, Some(g.x_star[k]));
        }
    }

    #[test]
    fn edge_violations_yield_bottom() {
        let g = toy();
        let mut corrupted = g.pi_star.clone();
        corrupted[0] = (corrupted[0] + 1) % g.sigma;
        let oracle = lift_assignment(corrupted.clone());
        let violated = {
            // edges whose endpoints include vertex 0
            let pts = g
                .edge_space
                .subspace
                .enumerate_points(&g.field, &Budget::default())
                .unwrap();
            pts.into_iter()
                .filter(|e| !g.psi(e, corrupted_label(&g, &corrupted, e, true), corrupted_label(&g, &corrupted, e, false)).is_some())
                .count()
        };
        assert!(violated > 0);
        let mut r = crate::rng::root(10);
        let mut saw_bottom = false;
        for trial in 0..300 {
            let k = trial % g.t;
            let (e, inst) = sample_edecoder_instance(&g, k, 1, 2, &mut r).unwrap();
            let out = run_e_decoder(&g, &oracle, &e, &inst, &mut r).unwrap();
            if out.edge_violation {
                assert_eq!(out.output, None);
                saw_bottom = true;
            }
        }
        assert!(saw_bottom);
    }

    fn corrupted_label(
        g: &LinearDecodingGraph,
        pi: &[Sym],
        e: &[u32],
        left: bool,
    ) -> Sym {
        let part = if left {
            edge_left(e, g.m)
        } else {
            edge_right(e, g.m)
        };
        pi[point_index(g.field.order(), part) as usize]
    }

    #[test]
    fn refusal_oracle_outputs_bottom() {
        let g = toy();
        let mut r = crate::rng::root(11);
        let (e, inst) = sample_edecoder_instance(&g, 0, 1, 2, &mut r).unwrap();
        let out = run_e_decoder(&g, &ProductOracle::RefuseAll, &e, &inst, &mut r).unwrap();
        assert_eq!(out.output, None);
    }
}
