//! De Bruijn shift graphs, permutation routing on them, the linear-structure
//! predicate, and the embedding of constraint graphs onto them.

pub mod embed;
pub mod linear;
pub mod routing;

use serde::{Deserialize, Serialize};

/// The de Bruijn graph on words of length m over an alphabet of size lambda:
/// each word (a1,...,am) has an outgoing edge to (a2,...,am,b) for every
/// symbol b. Vertices are word indices with the first symbol most
/// significant; the graph is held implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeBruijn {
    pub lambda: usize,
    pub m: usize,
}

impl DeBruijn {
    pub fn new(lambda: usize, m: usize) -> Self {
        assert!(lambda >= 2 && m >= 1);
        DeBruijn { lambda, m }
    }

    pub fn vertex_count(&self) -> usize {
        self.lambda.pow(self.m as u32)
    }

    pub fn edge_count(&self) -> usize {
        self.lambda.pow(self.m as u32 + 1)
    }

    fn suffix_modulus(&self) -> usize {
        self.lambda.pow(self.m as u32 - 1)
    }

    /// Successor word: drop the first symbol, append `beta`.
    pub fn successor(&self, w: usize, beta: usize) -> usize {
        debug_assert!(beta < self.lambda);
        (w % self.suffix_modulus()) * self.lambda + beta
    }

    pub fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        let base = (w % self.suffix_modulus()) * self.lambda;
        (0..self.lambda).map(move |b| base + b)
    }

    pub fn predecessors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        let tail = w / self.lambda;
        let shift = self.suffix_modulus();
        (0..self.lambda).map(move |g| g * shift + tail)
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        v / self.lambda == u % self.suffix_modulus()
    }

    /// Dense edge id of (u, v): u * lambda + last symbol of v.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if self.is_edge(u, v) {
            Some(u * self.lambda + v % self.lambda)
        } else {
            None
        }
    }

    pub fn edge_endpoints(&self, id: usize) -> (usize, usize) {
        let u = id / self.lambda;
        let beta = id % self.lambda;
        (u, self.successor(u, beta))
    }

    /// Word as digit string, first symbol first.
    pub fn digits(&self, w: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.m];
        let mut rem = w;
        for i in (0..self.m).rev() {
            out[i] = rem % self.lambda;
            rem /= self.lambda;
        }
        out
    }

    pub fn word_from_digits(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.lambda + d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn successors_follow_the_shift_rule() {
        // lambda=2, m=2: word 00 has successors {00, 01} (self-loop at 00)
        let db = DeBruijn::new(2, 2);
        let succ: Vec<usize> = db.successors(0).collect();
        assert_eq!(succ, vec![0, 1]);
        assert!(db.is_edge(0, 0));
        // word 10 (index 2) -> {00, 01}
        let succ: Vec<usize> = db.successors(2).collect();
        assert_eq!(succ, vec![0, 1]);
    }

    #[test]
    fn edge_count_and_degrees() {
        for (lambda, m) in [(2, 3), (3, 2), (4, 2)] {
            let db = DeBruijn::new(lambda, m);
            assert_eq!(db.edge_count(), lambda.pow(m as u32 + 1));
            let mut indeg = vec![0usize; db.vertex_count()];
            for u in 0..db.vertex_count() {
                let succ: Vec<_> = db.successors(u).collect();
                assert_eq!(succ.len(), lambda);
                for v in succ {
                    indeg[v] += 1;
                    assert!(db.predecessors(v).any(|p| p == u));
                }
            }
            assert!(indeg.iter().all(|&d| d == lambda));
        }
    }

    #[test]
    fn edge_ids_are_dense_and_consistent() {
        let db = DeBruijn::new(3, 2);
        let mut seen = vec![false; db.edge_count()];
        for u in 0..db.vertex_count() {
            for v in db.successors(u) {
                let id = db.edge_id(u, v).unwrap();
                assert!(!seen[id]);
                seen[id] = true;
                assert_eq!(db.edge_endpoints(id), (u, v));
            }
        }
        assert!(seen.iter().all(|&b| b));
        assert_eq!(db.edge_id(0, 4), None);
    }

    #[test]
    fn digit_roundtrip() {
        let db = DeBruijn::new(4, 3);
        for w in 0..db.vertex_count() {
            assert_eq!(db.word_from_digits(&db.digits(w)), w);
        }
        assert_eq!(db.digits(db.vertex_count() - 1), vec![3, 3, 3]);
    }
}
