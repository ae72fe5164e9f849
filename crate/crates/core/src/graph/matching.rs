//! Decomposition of regular directed multigraphs into perfect matchings.
//!
//! A d-regular directed multigraph (in-degree = out-degree = d, self-loops
//! allowed) splits into d permutations: repeatedly extract a perfect matching
//! of the bipartite out/in incidence graph with Hopcroft-Karp and remove it.

use crate::error::Error;

/// Maximum bipartite matching via Hopcroft-Karp. `adj[u]` lists right
/// neighbors of left vertex u. Returns, per left vertex, the matched right
/// vertex (or usize::MAX).
pub fn hopcroft_karp(left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    const NIL: usize = usize::MAX;
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    loop {
        // BFS layering from free left vertices
        let mut dist = vec![usize::MAX; left];
        let mut queue = std::collections::VecDeque::new();
        for u in 0..left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            }
        }
        let mut found_augmenting = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v] {
                    NIL => found_augmenting = true,
                    w => {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[u] + 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        if !found_augmenting {
            break;
        }
        // DFS along the layering
        fn try_augment(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [usize],
            match_l: &mut [usize],
            match_r: &mut [usize],
        ) -> bool {
            for i in 0..adj[u].len() {
                let v = adj[u][i];
                let w = match_r[v];
                if w == usize::MAX
                    || (dist[w] == dist[u].wrapping_add(1)
                        && try_augment(w, adj, dist, match_l, match_r))
                {
                    match_l[u] = v;
                    match_r[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..left {
            if match_l[u] == NIL && dist[u] == 0 {
                try_augment(u, adj, &mut dist, &mut match_l, &mut match_r);
            }
        }
    }
    match_l
}

/// Splits the edges (given as (u, v) pairs over `n` vertices) of a d-regular
/// directed multigraph into d perfect matchings. Each returned matching is a
/// list of edge indices forming a permutation of the vertices. Self-loops are
/// legal matching edges.
///
/// Even degrees halve along Euler circuits of the out/in incidence graph, so
/// the decomposition is near-linear when d is a power of two; an odd degree
/// peels one matching off with Hopcroft-Karp first.
pub fn matching_decomposition(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
) -> Result<Vec<Vec<usize>>, Error> {
    // regularity check, naming the offending vertex
    let mut out = vec![0usize; n];
    let mut inc = vec![0usize; n];
    for &(u, v) in edges {
        out[u] += 1;
        inc[v] += 1;
    }
    for v in 0..n {
        if out[v] != d || inc[v] != d {
            return Err(Error::NotRegular {
                vertex: v,
                out_degree: out[v],
                in_degree: inc[v],
                expected: d,
            });
        }
    }
    let ids: Vec<usize> = (0..edges.len()).collect();
    let mut matchings = decompose(n, edges, ids, d)?;
    for m in matchings.iter_mut() {
        m.sort_unstable_by_key(|&i| edges[i].0);
    }
    Ok(matchings)
}

fn decompose(
    n: usize,
    edges: &[(usize, usize)],
    ids: Vec<usize>,
    d: usize,
) -> Result<Vec<Vec<usize>>, Error> {
    if d == 1 {
        return Ok(vec![ids]);
    }
    if d.is_multiple_of(2) {
        let (a, b) = euler_split(n, edges, &ids);
        let mut out = decompose(n, edges, a, d / 2)?;
        out.extend(decompose(n, edges, b, d / 2)?);
        return Ok(out);
    }
    // odd degree: peel one perfect matching off, then halve the rest
    let matching = extract_matching(n, edges, &ids)?;
    let taken: std::collections::HashSet<usize> = matching.iter().copied().collect();
    let rest: Vec<usize> = ids.into_iter().filter(|i| !taken.contains(i)).collect();
    let mut out = vec![matching];
    out.extend(decompose(n, edges, rest, d - 1)?);
    Ok(out)
}

/// Splits a 2k-regular edge set into two k-regular halves by walking Euler
/// circuits of the bipartite out/in incidence graph and alternating sides.
/// Circuits in a bipartite graph have even length, so every vertex's
/// incidences split evenly.
fn euler_split(
    n: usize,
    edges: &[(usize, usize)],
    ids: &[usize],
) -> (Vec<usize>, Vec<usize>) {
    // incidence nodes: 0..n are out-sides, n..2n are in-sides
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 2 * n]; // (edge pos, other node)
    for (pos, &id) in ids.iter().enumerate() {
        let (u, v) = edges[id];
        adj[u].push((pos, n + v));
        adj[n + v].push((pos, u));
    }
    let mut used = vec![false; ids.len()];
    let mut cursor = vec![0usize; 2 * n];
    let mut class_a = Vec::with_capacity(ids.len() / 2);
    let mut class_b = Vec::with_capacity(ids.len() / 2);
    for start in 0..2 * n {
        while cursor[start] < adj[start].len() {
            // Hierholzer: emit the edge that entered a node when the node is
            // popped; the emitted sequence is the circuit reversed, which is
            // itself a circuit, so alternating along it is valid
            let mut circuit: Vec<usize> = Vec::new();
            let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
            while let Some(&(node, entered_by)) = stack.last() {
                let mut advanced = false;
                while cursor[node] < adj[node].len() {
                    let (pos, other) = adj[node][cursor[node]];
                    cursor[node] += 1;
                    if !used[pos] {
                        used[pos] = true;
                        stack.push((other, Some(pos)));
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    stack.pop();
                    if let Some(pos) = entered_by {
                        circuit.push(pos);
                    }
                }
            }
            for (i, &pos) in circuit.iter().enumerate() {
                if i % 2 == 0 {
                    class_a.push(ids[pos]);
                } else {
                    class_b.push(ids[pos]);
                }
            }
        }
    }
    (class_a, class_b)
}

/// One perfect matching of a regular edge set, via Hopcroft-Karp.
fn extract_matching(
    n: usize,
    edges: &[(usize, usize)],
    ids: &[usize],
) -> Result<Vec<usize>, Error> {
    let mut by_left: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &id in ids {
        by_left[edges[id].0].push(id);
    }
    let adj: Vec<Vec<usize>> = by_left
        .iter()
        .map(|ids| ids.iter().map(|&i| edges[i].1).collect())
        .collect();
    let match_l = hopcroft_karp(n, n, &adj);
    if match_l.contains(&usize::MAX) {
        return Err(Error::Precondition(
            "regular multigraph failed to yield a perfect matching".into(),
        ));
    }
    let mut matching = Vec::with_capacity(n);
    for u in 0..n {
        let v = match_l[u];
        let id = by_left[u]
            .iter()
            .copied()
            .find(|&i| edges[i].1 == v)
            .expect("matched edge exists");
        matching.push(id);
    }
    Ok(matching)
}

/// Checks that `matchings` is a valid decomposition: parts are disjoint,
/// their union covers every edge index once, and each part is a permutation.
pub fn verify_decomposition(
    n: usize,
    edges: &[(usize, usize)],
    matchings: &[Vec<usize>],
) -> bool {
    let mut seen = vec![false; edges.len()];
    for m in matchings {
        let mut out_seen = vec![false; n];
        let mut in_seen = vec![false; n];
        for &i in m {
            if seen[i] {
                return false;
            }
            seen[i] = true;
            let (u, v) = edges[i];
            if out_seen[u] || in_seen[v] {
                return false;
            }
            out_seen[u] = true;
            in_seen[v] = true;
        }
        if !(out_seen.iter().all(|&b| b) && in_seen.iter().all(|&b| b)) {
            return false;
        }
    }
    seen.iter().all(|&b| b)
}
