//! Directed constraint graphs over a small alphabet: evaluation, exact and
//! heuristic satisfiability, and the two-query verifier view.

pub mod expander;
pub mod matching;
pub mod reduce;

use crate::budget::Budget;
use crate::error::Error;
use crate::rng::ChaCha8Rng;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A binary constraint over pairs of symbols. Parallel edges and self-loops
/// are allowed; a constraint is attached per edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "lowercase")]
pub enum Constraint {
    /// Accepts every pair.
    All,
    /// Accepts pairs with equal symbols.
    Equality,
    /// Accepts pairs with distinct symbols.
    NotEqual,
    /// Explicit accepted-pair set.
    Pairs(BTreeSet<(u32, u32)>),
    /// Projection constraint: accepts (a, b) iff f(a) = b.
    Projection(Vec<u32>),
    /// The reverse of an inner constraint: accepts (a, b) iff inner accepts (b, a).
    Transpose(Box<Constraint>),
}

impl Constraint {
    pub fn accepts(&self, a: u32, b: u32) -> bool {
        match self {
            Constraint::All => true,
            Constraint::Equality => a == b,
            Constraint::NotEqual => a != b,
            Constraint::Pairs(set) => set.contains(&(a, b)),
            Constraint::Projection(f) => f.get(a as usize).copied() == Some(b),
            Constraint::Transpose(inner) => inner.accepts(b, a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub constraint: Constraint,
}

/// A directed constraint graph (multigraph; self-loops allowed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintGraph {
    pub alphabet_size: u32,
    #[serde(rename = "vertices")]
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
}

/// Total assignment of symbols to vertices, indexed by vertex id.
pub type Assignment = Vec<u32>;

impl ConstraintGraph {
    pub fn new(alphabet_size: u32, vertex_count: usize) -> Self {
        ConstraintGraph {
            alphabet_size,
            vertex_count,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, constraint: Constraint) {
        debug_assert!(u < self.vertex_count && v < self.vertex_count);
        self.edges.push(Edge { u, v, constraint });
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.u == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.v == v).count()
    }

    /// Checks in-degree = out-degree = d for every vertex.
    pub fn check_regular(&self, d: usize) -> Result<(), Error> {
        let mut out = vec![0usize; self.vertex_count];
        let mut inc = vec![0usize; self.vertex_count];
        for e in &self.edges {
            out[e.u] += 1;
            inc[e.v] += 1;
        }
        for v in 0..self.vertex_count {
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

    /// Fraction of edges satisfied by `pi`. An empty edge set counts as fully
    /// satisfied, which keeps downstream pipelines total.
    pub fn eval_sat(&self, pi: &Assignment) -> Result<f64, Error> {
        if pi.len() < self.vertex_count {
            return Err(Error::MissingLabel(pi.len()));
        }
        if self.edges.is_empty() {
            return Ok(1.0);
        }
        let sat = self
            .edges
            .iter()
            .filter(|e| e.constraint.accepts(pi[e.u], pi[e.v]))
            .count();
        Ok(sat as f64 / self.edges.len() as f64)
    }

    /// Number of edges violated by `pi`.
    pub fn count_violations(&self, pi: &Assignment) -> usize {
        self.edges
            .iter()
            .filter(|e| !e.constraint.accepts(pi[e.u], pi[e.v]))
            .count()
    }

    /// Exact maximum of `eval_sat` over all assignments, with a witness.
    /// Brute force over alphabet_size^vertex_count assignments.
    pub fn sat_exact(&self, budget: &Budget) -> Result<(f64, Assignment), Error> {
        let total = (self.alphabet_size as u128)
            .checked_pow(self.vertex_count as u32)
            .ok_or(Error::BudgetExceeded {
                required: u128::MAX,
                budget: budget.max_items,
            })?;
        budget.check(total)?;
        if self.edges.is_empty() {
            return Ok((1.0, vec![0; self.vertex_count]));
        }
        let mut best_violations = usize::MAX;
        let mut best = vec![0u32; self.vertex_count];
        let mut pi = vec![0u32; self.vertex_count];
        loop {
            let violations = self.count_violations(&pi);
            if violations < best_violations {
                best_violations = violations;
                best = pi.clone();
                if violations == 0 {
                    break;
                }
            }
            // odometer increment
            let mut i = 0;
            loop {
                if i == self.vertex_count {
                    let sat = 1.0 - best_violations as f64 / self.edges.len() as f64;
                    return Ok((sat, best));
                }
                pi[i] += 1;
                if pi[i] < self.alphabet_size {
                    break;
                }
                pi[i] = 0;
                i += 1;
            }
        }
        Ok((1.0, best))
    }

    /// Exact satisfiability decision by backtracking with forward checking
    /// over a breadth-first vertex order. Returns a witness when satisfiable.
    pub fn decide_satisfiable(&self) -> Option<Assignment> {
        // BFS order so each new vertex is constrained by assigned neighbors
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        let mut order = Vec::with_capacity(self.vertex_count);
        let mut seen = vec![false; self.vertex_count];
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            let mut queue = std::collections::VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &ei in &adj[v] {
                    for w in [self.edges[ei].u, self.edges[ei].v] {
                        if !seen[w] {
                            seen[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        let mut pi = vec![u32::MAX; self.vertex_count];
        let consistent = |pi: &Assignment, v: usize| -> bool {
            adj[v].iter().all(|&ei| {
                let e = &self.edges[ei];
                if pi[e.u] == u32::MAX || pi[e.v] == u32::MAX {
                    true
                } else {
                    e.constraint.accepts(pi[e.u], pi[e.v])
                }
            })
        };
        fn backtrack(
            g: &ConstraintGraph,
            order: &[usize],
            depth: usize,
            pi: &mut Assignment,
            consistent: &dyn Fn(&Assignment, usize) -> bool,
        ) -> bool {
            if depth == order.len() {
                return true;
            }
            let v = order[depth];
            for sym in 0..g.alphabet_size {
                pi[v] = sym;
                if consistent(pi, v) && backtrack(g, order, depth + 1, pi, consistent) {
                    return true;
                }
            }
            pi[v] = u32::MAX;
            false
        }
        if backtrack(self, &order, 0, &mut pi, &consistent) {
            Some(pi)
        } else {
            None
        }
    }

    /// Witnessed lower bound on sat: greedy local search with random
    /// restarts. The returned assignment achieves the returned fraction.
    pub fn sat_lower_bound(&self, restarts: usize, rng: &mut ChaCha8Rng) -> (f64, Assignment) {
        if self.edges.is_empty() {
            return (1.0, vec![0; self.vertex_count]);
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        let mut best_violations = usize::MAX;
        let mut best = vec![0u32; self.vertex_count];
        for _ in 0..restarts.max(1) {
            let mut pi: Assignment = (0..self.vertex_count)
                .map(|_| rng.gen_range(0..self.alphabet_size))
                .collect();
            let mut improved = true;
            while improved {
                improved = false;
                let mut order: Vec<usize> = (0..self.vertex_count).collect();
                order.shuffle(rng);
                for v in order {
                    let local = |pi: &Assignment| {
                        adj[v]
                            .iter()
                            .filter(|&&ei| {
                                let e = &self.edges[ei];
                                !e.constraint.accepts(pi[e.u], pi[e.v])
                            })
                            .count()
                    };
                    let current = local(&pi);
                    if current == 0 {
                        continue;
                    }
                    let original = pi[v];
                    let mut best_sym = original;
                    let mut best_local = current;
                    for sym in 0..self.alphabet_size {
                        pi[v] = sym;
                        let c = local(&pi);
                        if c < best_local {
                            best_local = c;
                            best_sym = sym;
                        }
                    }
                    pi[v] = best_sym;
                    if best_local < current {
                        improved = true;
                    }
                }
            }
            let violations = self.count_violations(&pi);
            if violations < best_violations {
                best_violations = violations;
                best = pi;
                if violations == 0 {
                    break;
                }
            }
        }
        (
            1.0 - best_violations as f64 / self.edges.len() as f64,
            best,
        )
    }
}

/// Two-query verifier view of a constraint graph: randomness index r picks
/// the r-th edge, whose endpoints are the two queries and whose constraint is
/// the accepting predicate.
pub struct TwoQueryVerifier<'a> {
    graph: &'a ConstraintGraph,
}

impl<'a> TwoQueryVerifier<'a> {
    pub fn new(graph: &'a ConstraintGraph) -> Self {
        TwoQueryVerifier { graph }
    }

    /// Number of random bits needed to pick a test.
    pub fn randomness_complexity(&self) -> u32 {
        (self.graph.edges.len().max(1) as f64).log2().ceil() as u32
    }

    pub fn test_count(&self) -> usize {
        self.graph.edges.len()
    }

    /// Queries and predicate for randomness index r.
    pub fn test(&self, r: usize) -> (usize, usize, &Constraint) {
        let e = &self.graph.edges[r];
        (e.u, e.v, &e.constraint)
    }

    /// Acceptance probability of `pi` over uniform randomness; coincides with
    /// eval_sat by construction.
    pub fn acceptance(&self, pi: &Assignment) -> Result<f64, Error> {
        let mut accepted = 0usize;
        for r in 0..self.test_count() {
            let (u, v, c) = self.test(r);
            if c.accepts(pi[u], pi[v]) {
                accepted += 1;
            }
        }
        Ok(accepted as f64 / self.test_count().max(1) as f64)
    }
}

/// Directed 3-cycle with inequality constraints over a binary alphabet; the
/// canonical small unsatisfiable instance (best assignments satisfy 2/3).
pub fn cycle_inequality_instance() -> ConstraintGraph {
    let mut g = ConstraintGraph::new(2, 3);
    g.add_edge(0, 1, Constraint::NotEqual);
    g.add_edge(1, 2, Constraint::NotEqual);
    g.add_edge(2, 0, Constraint::NotEqual);
    g
}

/// Random graph with a planted satisfying assignment: each edge accepts the
/// planted pair plus a few random extra pairs.
pub fn planted_instance(
    vertex_count: usize,
    edge_count: usize,
    alphabet_size: u32,
    extra_pairs: usize,
    rng: &mut ChaCha8Rng,
) -> (ConstraintGraph, Assignment) {
    let planted: Assignment = (0..vertex_count)
        .map(|_| rng.gen_range(0..alphabet_size))
        .collect();
    let mut g = ConstraintGraph::new(alphabet_size, vertex_count);
    for _ in 0..edge_count {
        let u = rng.gen_range(0..vertex_count);
        let v = rng.gen_range(0..vertex_count);
        let mut pairs = BTreeSet::new();
        pairs.insert((planted[u], planted[v]));
        for _ in 0..extra_pairs {
            pairs.insert((
                rng.gen_range(0..alphabet_size),
                rng.gen_range(0..alphabet_size),
            ));
        }
        g.add_edge(u, v, Constraint::Pairs(pairs));
    }
    (g, planted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn eval_sat_basics() {
        let mut g = ConstraintGraph::new(2, 2);
        g.add_edge(0, 1, Constraint::All);
        assert_eq!(g.eval_sat(&vec![0, 1]).unwrap(), 1.0);

        let mut g = ConstraintGraph::new(2, 2);
        g.add_edge(0, 1, Constraint::Equality);
        assert_eq!(g.eval_sat(&vec![1, 1]).unwrap(), 1.0);
        assert_eq!(g.eval_sat(&vec![0, 1]).unwrap(), 0.0);

        // directed 3-cycle with equality constraints, labels (a,a,b): 1/3
        let mut g = ConstraintGraph::new(2, 3);
        g.add_edge(0, 1, Constraint::Equality);
        g.add_edge(1, 2, Constraint::Equality);
        g.add_edge(2, 0, Constraint::Equality);
        let sat = g.eval_sat(&vec![0, 0, 1]).unwrap();
        assert!((sat - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eval_sat_missing_label_errors() {
        let mut g = ConstraintGraph::new(2, 3);
        g.add_edge(0, 2, Constraint::All);
        assert!(g.eval_sat(&vec![0, 1]).is_err());
    }

    #[test]
    fn sat_exact_on_small_instances() {
        let budget = Budget::default();
        let g = cycle_inequality_instance();
        let (sat, witness) = g.sat_exact(&budget).unwrap();
        assert!((sat - 2.0 / 3.0).abs() < 1e-12);
        assert!((g.eval_sat(&witness).unwrap() - sat).abs() < 1e-12);
        assert!(g.decide_satisfiable().is_none());

        // empty edge set: sat = 1 by convention
        let empty = ConstraintGraph::new(3, 2);
        assert_eq!(empty.sat_exact(&budget).unwrap().0, 1.0);

        let mut rng = rng::root(5);
        let (planted, pi) = planted_instance(5, 8, 2, 1, &mut rng);
        assert_eq!(planted.eval_sat(&pi).unwrap(), 1.0);
        let (sat, _) = planted.sat_exact(&budget).unwrap();
        assert_eq!(sat, 1.0);
        assert!(planted.decide_satisfiable().is_some());
    }

    #[test]
    fn lower_bound_is_sound() {
        let budget = Budget::default();
        let mut rng = rng::root(9);
        for seed in 0..5 {
            let mut r2 = rng::stream(seed, 0);
            let (g, _) = planted_instance(5, 10, 2, 1, &mut r2);
            let (lb, witness) = g.sat_lower_bound(10, &mut rng);
            let (exact, _) = g.sat_exact(&budget).unwrap();
            assert!(lb <= exact + 1e-12);
            assert!((g.eval_sat(&witness).unwrap() - lb).abs() < 1e-12);
        }
        // planted instances are found satisfiable with enough restarts
        let mut r2 = rng::stream(77, 0);
        let (g, _) = planted_instance(6, 9, 2, 2, &mut r2);
        let (lb, _) = g.sat_lower_bound(50, &mut rng);
        assert_eq!(lb, 1.0);
        // all-rejecting constraints give 0
        let mut g = ConstraintGraph::new(2, 2);
        g.add_edge(0, 1, Constraint::Pairs(BTreeSet::new()));
        let (lb, _) = g.sat_lower_bound(3, &mut rng);
        assert_eq!(lb, 0.0);
    }

    #[test]
    fn verifier_acceptance_equals_eval_sat() {
        let mut rng = rng::root(13);
        let (g, pi) = planted_instance(6, 12, 3, 2, &mut rng);
        let verifier = TwoQueryVerifier::new(&g);
        assert_eq!(verifier.acceptance(&pi).unwrap(), 1.0);
        for _ in 0..20 {
            let random_pi: Assignment = (0..6).map(|_| rng.gen_range(0..3)).collect();
            let a = verifier.acceptance(&random_pi).unwrap();
            let s = g.eval_sat(&random_pi).unwrap();
            assert_eq!(a, s);
        }
        assert_eq!(verifier.randomness_complexity(), 4); // ceil(log2 12)
    }

    #[test]
    fn transpose_constraint() {
        let c = Constraint::Transpose(Box::new(Constraint::Projection(vec![1, 0])));
        assert!(c.accepts(0, 1)); // inner accepts (1, 0): f(1) = 0
        assert!(!c.accepts(1, 1));
    }
}
