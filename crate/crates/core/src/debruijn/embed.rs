//! Embedding a constraint graph onto a de Bruijn graph.
//!
//! The input is made regular by expander replacement (skipped when it is
//! already regular), its vertices are identified with de Bruijn words in
//! lexicographic order, and its d perfect matchings become permutations that
//! the de Bruijn graph routes in 2m hops. Vertex labels carry one symbol per
//! routing and time slot, so a label is a (Sigma^l)^d tuple with l = 2m.
//!
//! Each de Bruijn edge checks, per routing: the time-slot consistency of
//! every routing hop it carries, agreement of the first slots across
//! routings at both endpoints, and, when it is the final hop of a routing
//! path, the original constraint between the delivered message and the
//! receiver's own first slot. Messages are checked on delivery: the receiving
//! endpoint of the last hop stores nothing new, so exactly 2m slots suffice.

use super::routing::{route_permutation, RoutingPaths};
use super::DeBruijn;
use crate::error::Error;
use crate::graph::matching::matching_decomposition;
use crate::graph::reduce::{degree_reduce_with, DegreeReduced};
use crate::graph::{Assignment, ConstraintGraph};

/// One primitive check attached to a directed de Bruijn edge.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Check {
    /// labels[tail][i, tail_slot] == labels[head][i, head_slot]
    SlotEq {
        i: u32,
        tail_slot: u32,
        head_slot: u32,
    },
    /// (labels[tail][i, l-1], labels[head][i, 0]) satisfies the original
    /// constraint; None means the identity routing, checked as equality.
    Deliver { i: u32, g1_edge: Option<usize> },
    /// Slot (i, 0) agrees across all routings i, at both endpoints.
    FirstSlotsAgree,
}

/// Label of one embedded vertex: d*l base symbols, slot (i, j) at i*l + j.
pub type TupleLabel = Vec<u32>;

/// A constraint graph whose underlying graph is the de Bruijn graph.
#[derive(Debug, Clone)]
pub struct EmbeddedGraph {
    pub db: DeBruijn,
    /// Base alphabet of the embedded constraints.
    pub sigma: u32,
    /// Number of routings = regularity of the intermediate graph.
    pub d: usize,
    /// Slots per routing, 2m.
    pub l: usize,
    /// The regular intermediate graph whose constraints are simulated.
    pub g1: ConstraintGraph,
    /// copy -> original vertex, when degree reduction ran.
    pub reduced_owner: Option<Vec<usize>>,
    /// Extended permutations over de Bruijn words, one per matching.
    pub mu: Vec<Vec<usize>>,
    /// Routing paths per matching.
    pub paths: Vec<RoutingPaths>,
    /// Per matching and word: the simulated edge of g1, if the word is
    /// identified and matched there.
    matched_edge: Vec<Vec<Option<usize>>>,
    /// Per directed de Bruijn edge id: the checks it enforces.
    checks: Vec<Vec<Check>>,
}

/// Embeds `g` onto the de Bruijn graph with the given alphabet size and word
/// length. `seed` drives the expander replacement (when needed).
pub fn embed(
    g: &ConstraintGraph,
    lambda: usize,
    m: usize,
    seed: u64,
    expander_degree: usize,
    expander_threshold: f64,
) -> Result<EmbeddedGraph, Error> {
    if g.edges.is_empty() {
        return Err(Error::Precondition("cannot embed an empty graph".into()));
    }
    let db = DeBruijn::new(lambda, m);
    if (db.vertex_count() as u128) < 2 * g.edges.len() as u128 {
        return Err(Error::Precondition(format!(
            "capacity: lambda^m = {} < 2 |E| = {}",
            db.vertex_count(),
            2 * g.edges.len()
        )));
    }

    // regularize, skipping the expander replacement when already regular
    let (g1, reduced_owner, d) = match already_regular(g) {
        Some(d) => (g.clone(), None, d),
        None => {
            let DegreeReduced {
                graph,
                degree,
                copy_owner,
            } = degree_reduce_with(g, expander_degree, expander_threshold, seed)?;
            (graph, Some(copy_owner), degree)
        }
    };
    if g1.vertex_count > db.vertex_count() {
        return Err(Error::Precondition(format!(
            "capacity: regularized graph has {} vertices > lambda^m = {}",
            g1.vertex_count,
            db.vertex_count()
        )));
    }

    let edge_pairs: Vec<(usize, usize)> = g1.edges.iter().map(|e| (e.u, e.v)).collect();
    let matchings = matching_decomposition(g1.vertex_count, &edge_pairs, d)?;

    let l = 2 * m;
    let n_words = db.vertex_count();
    let mut mu_all = Vec::with_capacity(d);
    let mut matched_edge_all = Vec::with_capacity(d);
    let mut paths_all = Vec::with_capacity(d);
    let mut checks: Vec<Vec<Check>> = vec![vec![Check::FirstSlotsAgree]; db.edge_count()];

    for matching in &matchings {
        // identified vertices follow their matching edge, other words stay put
        let mut mu: Vec<usize> = (0..n_words).collect();
        let mut matched_edge: Vec<Option<usize>> = vec![None; n_words];
        for &ei in matching {
            let (u, v) = edge_pairs[ei];
            mu[u] = v;
            matched_edge[u] = Some(ei);
        }
        let paths = route_permutation(&db, &mu)?;
        let i = mu_all.len() as u32;
        for (source, path) in paths.paths.iter().enumerate() {
            for j in 0..l {
                let x = path[j];
                let y = path[j + 1];
                if j + 1 < l {
                    // interior hop: time-slot consistency, attached to the
                    // underlying directed edge
                    if let Some(id) = db.edge_id(x, y) {
                        checks[id].push(Check::SlotEq {
                            i,
                            tail_slot: j as u32,
                            head_slot: (j + 1) as u32,
                        });
                    } else {
                        let id = db
                            .edge_id(y, x)
                            .expect("path steps follow de Bruijn edges");
                        checks[id].push(Check::SlotEq {
                            i,
                            tail_slot: (j + 1) as u32,
                            head_slot: j as u32,
                        });
                    }
                } else {
                    // final hop: always a forward edge; check the simulated
                    // constraint on delivery
                    let id = db
                        .edge_id(x, y)
                        .expect("final routing hop is a forward edge");
                    checks[id].push(Check::Deliver {
                        i,
                        g1_edge: matched_edge[source],
                    });
                }
            }
        }
        mu_all.push(mu);
        matched_edge_all.push(matched_edge);
        paths_all.push(paths);
    }

    Ok(EmbeddedGraph {
        db,
        sigma: g.alphabet_size,
        d,
        l,
        g1,
        reduced_owner,
        mu: mu_all,
        paths: paths_all,
        matched_edge: matched_edge_all,
        checks,
    })
}

fn already_regular(g: &ConstraintGraph) -> Option<usize> {
    let mut out = vec![0usize; g.vertex_count];
    let mut inc = vec![0usize; g.vertex_count];
    for e in &g.edges {
        out[e.u] += 1;
        inc[e.v] += 1;
    }
    let d = out.first().copied()?;
    if d >= 1 && out.iter().all(|&x| x == d) && inc.iter().all(|&x| x == d) {
        Some(d)
    } else {
        None
    }
}

impl EmbeddedGraph {
    /// Number of edges of the embedded graph: lambda^(m+1).
    pub fn size(&self) -> usize {
        self.db.edge_count()
    }

    /// Symbols per label: d * l.
    pub fn label_width(&self) -> usize {
        self.d * self.l
    }

    /// log_sigma of the alphabet size (the alphabet is Sigma^(l*d)).
    pub fn alphabet_exponent(&self) -> usize {
        self.label_width()
    }

    /// The simulated-graph edge whose message routing `i` carries out of
    /// `word`, when the word is identified and matched there.
    pub fn simulated_edge(&self, i: usize, word: usize) -> Option<usize> {
        self.matched_edge[i][word]
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.l + j
    }

    /// Assignment of the intermediate regular graph induced by an assignment
    /// of the original input graph.
    pub fn to_g1_assignment(&self, pi: &Assignment) -> Assignment {
        match &self.reduced_owner {
            Some(owner) => owner.iter().map(|&v| pi[v]).collect(),
            None => pi.clone(),
        }
    }

    /// Honest lift: route every message and record, per vertex, routing and
    /// time slot, the message it carries then. Words not identified with
    /// graph vertices carry the symbol 0.
    pub fn lift(&self, pi: &Assignment) -> Vec<TupleLabel> {
        let pi1 = self.to_g1_assignment(pi);
        self.lift_g1(&pi1)
    }

    /// Honest lift of an assignment of the intermediate graph itself.
    pub fn lift_g1(&self, pi1: &Assignment) -> Vec<TupleLabel> {
        let message = |w: usize| -> u32 {
            if w < self.g1.vertex_count {
                pi1[w]
            } else {
                0
            }
        };
        let mut labels = vec![vec![0u32; self.label_width()]; self.db.vertex_count()];
        for (i, paths) in self.paths.iter().enumerate() {
            for (source, path) in paths.paths.iter().enumerate() {
                let msg = message(source);
                for j in 0..self.l {
                    labels[path[j]][self.slot(i, j)] = msg;
                }
            }
        }
        labels
    }

    /// Whether edge `id` accepts the pair of labels (tail, head).
    pub fn edge_accepts(&self, id: usize, a: &TupleLabel, b: &TupleLabel) -> bool {
        self.checks[id].iter().all(|c| match c {
            Check::SlotEq {
                i,
                tail_slot,
                head_slot,
            } => {
                a[self.slot(*i as usize, *tail_slot as usize)]
                    == b[self.slot(*i as usize, *head_slot as usize)]
            }
            Check::Deliver { i, g1_edge } => {
                let sent = a[self.slot(*i as usize, self.l - 1)];
                let own = b[self.slot(*i as usize, 0)];
                match g1_edge {
                    Some(ei) => self.g1.edges[*ei].constraint.accepts(sent, own),
                    None => sent == own,
                }
            }
            Check::FirstSlotsAgree => {
                (1..self.d).all(|i| {
                    a[self.slot(i, 0)] == a[self.slot(0, 0)]
                        && b[self.slot(i, 0)] == b[self.slot(0, 0)]
                })
            }
        })
    }

    pub fn count_violations(&self, labels: &[TupleLabel]) -> usize {
        (0..self.size())
            .filter(|&id| {
                let (u, v) = self.db.edge_endpoints(id);
                !self.edge_accepts(id, &labels[u], &labels[v])
            })
            .count()
    }

    pub fn eval_sat(&self, labels: &[TupleLabel]) -> f64 {
        1.0 - self.count_violations(labels) as f64 / self.size() as f64
    }

    /// Serializes the embedded graph: the shift-graph header plus per-edge
    /// check lists.
    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = (0..self.size())
            .map(|id| {
                let (u, v) = self.db.edge_endpoints(id);
                let checks: Vec<serde_json::Value> = self.checks[id]
                    .iter()
                    .map(|c| match c {
                        Check::SlotEq {
                            i,
                            tail_slot,
                            head_slot,
                        } => serde_json::json!({
                            "type": "slot_eq", "routing": i,
                            "tail_slot": tail_slot, "head_slot": head_slot,
                        }),
                        Check::Deliver { i, g1_edge } => serde_json::json!({
                            "type": "deliver", "routing": i, "edge": g1_edge,
                        }),
                        Check::FirstSlotsAgree => serde_json::json!({
                            "type": "first_slots_agree",
                        }),
                    })
                    .collect();
                serde_json::json!({
                    "u": u, "v": v,
                    "constraint": {"type": "debruijn", "data": checks},
                })
            })
            .collect();
        serde_json::json!({
            "debruijn": {
                "alphabet_size": self.db.lambda,
                "m": self.db.m,
                "d": self.d,
                "l": self.l,
                "sigma": self.sigma,
            },
            "vertices": self.db.vertex_count(),
            "edges": edges,
        })
    }

    /// Exact satisfiability decision. All slot-consistency and first-slot
    /// checks are equalities, so the slot variables collapse into classes
    /// under union-find; what remains is a constraint graph over the classes
    /// carrying only the delivered original constraints, decided by
    /// backtracking. Returns a witness when satisfiable.
    pub fn decide_satisfiable(&self) -> Option<Vec<TupleLabel>> {
        let width = self.label_width();
        let var = |v: usize, slot: usize| v * width + slot;
        let mut dsu = Dsu::new(self.db.vertex_count() * width);
        // first slots agree across routings at every vertex
        for v in 0..self.db.vertex_count() {
            for i in 1..self.d {
                dsu.union(var(v, self.slot(i, 0)), var(v, self.slot(0, 0)));
            }
        }
        let mut class_constraints: Vec<(usize, usize, usize)> = Vec::new(); // (var_a, var_b, g1 edge)
        for id in 0..self.size() {
            let (u, v) = self.db.edge_endpoints(id);
            for c in &self.checks[id] {
                match c {
                    Check::SlotEq {
                        i,
                        tail_slot,
                        head_slot,
                    } => {
                        dsu.union(
                            var(u, self.slot(*i as usize, *tail_slot as usize)),
                            var(v, self.slot(*i as usize, *head_slot as usize)),
                        );
                    }
                    Check::Deliver { i, g1_edge } => {
                        let a = var(u, self.slot(*i as usize, self.l - 1));
                        let b = var(v, self.slot(*i as usize, 0));
                        match g1_edge {
                            None => {
                                dsu.union(a, b);
                            }
                            Some(ei) => class_constraints.push((a, b, *ei)),
                        }
                    }
                    Check::FirstSlotsAgree => {}
                }
            }
        }
        // compress classes into a constraint graph
        let mut class_of = vec![usize::MAX; self.db.vertex_count() * width];
        let mut class_count = 0usize;
        for x in 0..class_of.len() {
            let root = dsu.find(x);
            if class_of[root] == usize::MAX {
                class_of[root] = class_count;
                class_count += 1;
            }
            class_of[x] = class_of[root];
        }
        let mut class_graph = ConstraintGraph::new(self.sigma, class_count);
        for (a, b, ei) in class_constraints {
            class_graph.add_edge(
                class_of[a],
                class_of[b],
                self.g1.edges[ei].constraint.clone(),
            );
        }
        let class_assignment = class_graph.decide_satisfiable()?;
        let mut labels = vec![vec![0u32; width]; self.db.vertex_count()];
        for v in 0..self.db.vertex_count() {
            for s in 0..width {
                labels[v][s] = class_assignment[class_of[var(v, s)]];
            }
        }
        debug_assert_eq!(self.count_violations(&labels), 0);
        Some(labels)
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_inequality_instance, planted_instance};
    use crate::rng;

    #[test]
    fn cycle_embeds_with_exact_size_and_alphabet() {
        let g = cycle_inequality_instance();
        let e = embed(&g, 2, 3, 1, 8, 0.9).unwrap();
        assert_eq!(e.size(), 2usize.pow(4)); // lambda^(m+1)
        assert_eq!(e.d, 1); // the cycle is already 1-regular
        assert_eq!(e.l, 6);
        assert_eq!(e.alphabet_exponent(), 6); // alphabet Sigma^(l*d)
        assert!(e.reduced_owner.is_none());
    }

    #[test]
    fn satisfying_assignments_lift_to_satisfying_labels() {
        for seed in 0..3u64 {
            let mut r = rng::stream(seed, 2);
            let (g, pi) = planted_instance(6, 9, 2, 1, &mut r);
            let e = embed(&g, 2, 5, seed, 8, 0.9).unwrap();
            let labels = e.lift(&pi);
            assert_eq!(e.eval_sat(&labels), 1.0, "seed {seed}");
        }
    }

    #[test]
    fn unsatisfiable_cycle_stays_unsatisfiable_and_best_lift_misses_one_edge() {
        let g = cycle_inequality_instance();
        let e = embed(&g, 2, 3, 1, 8, 0.9).unwrap();
        assert!(e.decide_satisfiable().is_none());
        // the best cycle assignment violates one edge; its lift violates
        // exactly the corresponding delivery check
        let best = vec![0, 1, 0];
        assert_eq!(g.count_violations(&best), 1);
        let labels = e.lift(&best);
        assert_eq!(e.count_violations(&labels), 1);
        assert!((e.eval_sat(&labels) - 15.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn satisfiable_embeddings_are_decided_satisfiable() {
        let mut r = rng::stream(4, 2);
        let (g, _) = planted_instance(5, 7, 2, 1, &mut r);
        let e = embed(&g, 2, 4, 4, 8, 0.9).unwrap();
        let witness = e.decide_satisfiable().expect("satisfiable");
        assert_eq!(e.count_violations(&witness), 0);
    }

    #[test]
    fn capacity_precondition_is_enforced() {
        let g = cycle_inequality_instance();
        assert!(embed(&g, 2, 2, 0, 8, 0.9).is_err()); // 4 < 2*3
    }

    #[test]
    fn embedded_edge_sets_have_linear_structure_over_field_alphabets() {
        use crate::budget::Budget;
        use crate::debruijn::linear::check_linear_structure;
        use crate::field::Field;
        let g = cycle_inequality_instance();
        for (lambda, m) in [(2usize, 3usize), (3, 2), (4, 2)] {
            let e = embed(&g, lambda, m, 2, 8, 0.9).unwrap();
            let field = Field::new(lambda as u64).unwrap();
            let edges: Vec<(usize, usize)> =
                (0..e.size()).map(|id| e.db.edge_endpoints(id)).collect();
            let res = check_linear_structure(
                &field,
                m,
                e.db.vertex_count(),
                &edges,
                &Budget::default(),
            )
            .unwrap();
            assert!(res.is_linear(), "lambda={lambda}, m={m}");
        }
    }
}
