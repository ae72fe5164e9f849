//! Permutation routing on de Bruijn graphs.
//!
//! A permutation acting on the last i coordinates is routed by undirected
//! paths of 2i hops: contract the last coordinate of the permutation graph,
//! split the contraction into lambda perfect matchings, route each induced
//! suffix permutation recursively, and splice one leading hop (which shifts
//! the matching symbol in) and one trailing hop (which shifts it out) around
//! the recursive path. At every time step each vertex carries exactly one
//! message.

use super::DeBruijn;
use crate::error::Error;
use crate::graph::matching::matching_decomposition;

/// Paths realizing a suffix permutation: `paths[v]` starts at `v`, ends at
/// the image of `v`, and has exactly 2i hops (2i+1 vertex positions).
#[derive(Debug, Clone)]
pub struct RoutingPaths {
    pub db: DeBruijn,
    /// Suffix width the permutation acts on.
    pub i: usize,
    /// Full-vertex images: mu_ext[v] for every vertex.
    pub targets: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
}

/// Decomposition tree for a suffix permutation. Children are indexed by the
/// matching symbol; paths are extracted on demand.
struct RouteNode {
    i: usize,
    /// Permutation on suffix indices of width i.
    nu: Vec<usize>,
    /// Matching symbol of each width-i suffix (empty for leaves).
    matching_of: Vec<usize>,
    children: Vec<RouteNode>,
}

fn build_node(lambda: usize, i: usize, nu: Vec<usize>) -> Result<RouteNode, Error> {
    debug_assert_eq!(nu.len(), lambda.pow(i as u32));
    if i == 0 {
        return Ok(RouteNode {
            i,
            nu,
            matching_of: Vec::new(),
            children: Vec::new(),
        });
    }
    // contract the last suffix coordinate: one edge per width-i suffix s,
    // from drop_last(s) to drop_last(nu(s))
    let contracted = lambda.pow(i as u32 - 1);
    let edges: Vec<(usize, usize)> = nu
        .iter()
        .enumerate()
        .map(|(s, &t)| (s / lambda, t / lambda))
        .collect();
    let matchings = matching_decomposition(contracted, &edges, lambda)?;
    let mut matching_of = vec![usize::MAX; nu.len()];
    let mut children = Vec::with_capacity(lambda);
    for (sigma, matching) in matchings.iter().enumerate() {
        let mut child_nu = vec![usize::MAX; contracted];
        for &s in matching {
            matching_of[s] = sigma;
            child_nu[edges[s].0] = edges[s].1;
        }
        children.push(build_node(lambda, i - 1, child_nu)?);
    }
    debug_assert!(matching_of.iter().all(|&s| s != usize::MAX));
    Ok(RouteNode {
        i,
        nu,
        matching_of,
        children,
    })
}

fn path_for(node: &RouteNode, db: &DeBruijn, v: usize) -> Vec<usize> {
    if node.i == 0 {
        return vec![v];
    }
    let lambda = db.lambda;
    let width = lambda.pow(node.i as u32);
    let suffix = v % width;
    let sigma = node.matching_of[suffix];
    // leading hop: prepend the matching symbol, dropping the last symbol
    let entry = sigma * db.suffix_modulus() + v / lambda;
    let mut path = Vec::with_capacity(2 * node.i + 1);
    path.push(v);
    path.extend(path_for(&node.children[sigma], db, entry));
    // trailing hop: shift the matching symbol out, appending the image's
    // last symbol
    let target = (v / width) * width + node.nu[suffix];
    path.push(target);
    path
}

/// Routes a permutation `mu` of the width-i suffixes over the de Bruijn
/// graph. `mu` maps suffix indices to suffix indices and must be a bijection.
pub fn route(db: &DeBruijn, mu: &[usize], i: usize) -> Result<RoutingPaths, Error> {
    if i > db.m {
        return Err(Error::Precondition(format!(
            "suffix width {i} exceeds word length {}",
            db.m
        )));
    }
    let width = db.lambda.pow(i as u32);
    if mu.len() != width {
        return Err(Error::NotBijection(format!(
            "expected a permutation of {width} suffixes, got {} entries",
            mu.len()
        )));
    }
    let mut seen = vec![false; width];
    for &t in mu {
        if t >= width || seen[t] {
            return Err(Error::NotBijection("duplicate or out-of-range image".into()));
        }
        seen[t] = true;
    }

    let node = build_node(db.lambda, i, mu.to_vec())?;
    let mut paths = Vec::with_capacity(db.vertex_count());
    let mut targets = Vec::with_capacity(db.vertex_count());
    for v in 0..db.vertex_count() {
        let p = path_for(&node, db, v);
        targets.push(*p.last().expect("nonempty path"));
        paths.push(p);
    }
    Ok(RoutingPaths {
        db: *db,
        i,
        targets,
        paths,
    })
}

/// Routes a full permutation of the vertices (suffix width m).
pub fn route_permutation(db: &DeBruijn, mu: &[usize]) -> Result<RoutingPaths, Error> {
    route(db, mu, db.m)
}

impl RoutingPaths {
    /// Number of hops per path.
    pub fn hop_count(&self) -> usize {
        2 * self.i
    }

    /// Serializes as an array of paths, each an array of vertex words, each
    /// a digit array with the first symbol first.
    pub fn to_json(&self) -> serde_json::Value {
        let paths: Vec<Vec<Vec<usize>>> = self
            .paths
            .iter()
            .map(|p| p.iter().map(|&w| self.db.digits(w)).collect())
            .collect();
        serde_json::json!(paths)
    }

    /// Structural invariants: every path starts at its source, ends at the
    /// permutation image, walks along de Bruijn edges (in one direction or
    /// the other), and at every position each vertex appears exactly once.
    pub fn verify(&self) -> Result<(), Error> {
        let n = self.db.vertex_count();
        let len = self.hop_count() + 1;
        for (v, path) in self.paths.iter().enumerate() {
            if path.len() != len {
                return Err(Error::Malformed(format!(
                    "path {v} has {} positions, expected {len}",
                    path.len()
                )));
            }
            if path[0] != v || *path.last().unwrap() != self.targets[v] {
                return Err(Error::Malformed(format!("path {v} endpoints are wrong")));
            }
            let expected_suffix = {
                let width = self.db.lambda.pow(self.i as u32);
                (v / width) * width
            };
            let width = self.db.lambda.pow(self.i as u32);
            if self.targets[v] / width * width != expected_suffix {
                return Err(Error::Malformed(format!(
                    "path {v} image changes fixed coordinates"
                )));
            }
            for w in path.windows(2) {
                if !(self.db.is_edge(w[0], w[1]) || self.db.is_edge(w[1], w[0])) {
                    return Err(Error::Malformed(format!(
                        "path {v} uses a non-edge ({}, {})",
                        w[0], w[1]
                    )));
                }
            }
        }
        for j in 0..len {
            let mut seen = vec![false; n];
            for path in &self.paths {
                if seen[path[j]] {
                    return Err(Error::Malformed(format!(
                        "two paths occupy vertex {} at position {j}",
                        path[j]
                    )));
                }
                seen[path[j]] = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    #[test]
    fn identity_routes_home_in_2m_hops() {
        for (lambda, m) in [(2usize, 2usize), (3, 2), (2, 3)] {
            let db = DeBruijn::new(lambda, m);
            let mu: Vec<usize> = (0..db.vertex_count()).collect();
            let paths = route_permutation(&db, &mu).unwrap();
            paths.verify().unwrap();
            for (v, p) in paths.paths.iter().enumerate() {
                assert_eq!(p.len(), 2 * m + 1);
                assert_eq!(p[0], v);
                assert_eq!(*p.last().unwrap(), v);
            }
        }
    }

    #[test]
    fn zero_width_routing_is_trivial() {
        let db = DeBruijn::new(2, 3);
        let paths = route(&db, &[0], 0).unwrap();
        paths.verify().unwrap();
        for (v, p) in paths.paths.iter().enumerate() {
            assert_eq!(p, &vec![v]);
        }
    }

    #[test]
    fn random_full_permutations_route_correctly() {
        let mut rng = crate::rng::root(17);
        for (lambda, m) in [(2usize, 3usize), (3, 2), (4, 2)] {
            let db = DeBruijn::new(lambda, m);
            for _ in 0..10 {
                let mut mu: Vec<usize> = (0..db.vertex_count()).collect();
                mu.shuffle(&mut rng);
                let paths = route_permutation(&db, &mu).unwrap();
                paths.verify().unwrap();
                for (v, p) in paths.paths.iter().enumerate() {
                    assert_eq!(*p.last().unwrap(), mu[v]);
                }
            }
        }
    }

    #[test]
    fn partial_suffix_permutations_route_correctly() {
        let mut rng = crate::rng::root(23);
        let db = DeBruijn::new(3, 3);
        for i in [1usize, 2] {
            let width = 3usize.pow(i as u32);
            let mut mu: Vec<usize> = (0..width).collect();
            mu.shuffle(&mut rng);
            let paths = route(&db, &mu, i).unwrap();
            paths.verify().unwrap();
            for (v, p) in paths.paths.iter().enumerate() {
                assert_eq!(p.len(), 2 * i + 1);
                let expected = (v / width) * width + mu[v % width];
                assert_eq!(*p.last().unwrap(), expected);
            }
        }
    }

    #[test]
    fn non_bijections_are_rejected() {
        let db = DeBruijn::new(2, 2);
        assert!(route_permutation(&db, &[0, 0, 1, 2]).is_err());
        assert!(route_permutation(&db, &[0, 1]).is_err());
    }
}
