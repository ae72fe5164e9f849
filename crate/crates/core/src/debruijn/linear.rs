//! The linear-structure predicate: a directed graph on the vertex set F_q^m
//! has linear structure when its edge set, read as a subset of F_q^{2m}, is a
//! linear subspace whose left and right endpoint projections are all of F_q^m.

use super::DeBruijn;
use crate::budget::Budget;
use crate::error::Error;
use crate::field::Field;
use crate::space::{span, EdgeSpaceView, Side, Subspace, Vector};

/// Outcome of the check. `Linear` carries the edge-space basis as the
/// certificate.
#[derive(Debug, Clone)]
pub enum LinearStructureResult {
    Linear(EdgeSpaceView),
    NotLinear { reason: String },
}

impl LinearStructureResult {
    pub fn is_linear(&self) -> bool {
        matches!(self, LinearStructureResult::Linear(_))
    }
}

fn vertex_vector(field: &Field, m: usize, w: usize) -> Vector {
    let q = field.order() as usize;
    let mut coords = vec![0u32; m];
    let mut rem = w;
    for i in (0..m).rev() {
        coords[i] = (rem % q) as u32;
        rem /= q;
    }
    coords
}

/// Checks the linear-structure conditions for a graph given by explicit
/// edges over vertex indices 0..q^m. Errors if the vertex count is not q^m.
pub fn check_linear_structure(
    field: &Field,
    m: usize,
    vertex_count: usize,
    edges: &[(usize, usize)],
    budget: &Budget,
) -> Result<LinearStructureResult, Error> {
    let q = field.order() as usize;
    let expected = q.checked_pow(m as u32).ok_or(Error::BudgetExceeded {
        required: u128::MAX,
        budget: budget.max_items,
    })?;
    if vertex_count != expected {
        return Err(Error::Precondition(format!(
            "vertex set of size {vertex_count} is not F_{q}^{m} (size {expected})"
        )));
    }
    budget.check(edges.len() as u128)?;

    let mut edge_set: std::collections::BTreeSet<Vector> = std::collections::BTreeSet::new();
    for &(u, v) in edges {
        let mut vec = vertex_vector(field, m, u);
        vec.extend(vertex_vector(field, m, v));
        edge_set.insert(vec);
    }

    if !edge_set.contains(&vec![0u32; 2 * m]) {
        return Ok(LinearStructureResult::NotLinear {
            reason: "edge set does not contain the zero edge".into(),
        });
    }
    let basis_input: Vec<Vector> = edge_set.iter().cloned().collect();
    let space = span(field, &basis_input, 2 * m)?;
    budget.check(space.point_count())?;
    // closure: the set is a subspace iff it equals its span, and since it is
    // contained in the span it suffices to compare cardinalities
    if space.point_count() != edge_set.len() as u128 {
        return Ok(LinearStructureResult::NotLinear {
            reason: format!(
                "edge set of size {} spans a subspace with {} points; not closed",
                edge_set.len(),
                space.point_count()
            ),
        });
    }
    let view = EdgeSpaceView::new(space, m)?;
    for side in [Side::Left, Side::Right] {
        if view.project_side(field, side) != Subspace::full(field, m) {
            return Ok(LinearStructureResult::NotLinear {
                reason: format!("{side:?} projection of the edge space is not full"),
            });
        }
    }
    Ok(LinearStructureResult::Linear(view))
}

/// The edge space of the de Bruijn graph over a field alphabet, directly as
/// a basis: successor pairs (x, shift(x) + b e_m) are spanned by
/// (e_1 | 0), (e_i | e_{i-1}) for i = 2..m, and (0 | e_m).
pub fn debruijn_edge_space(field: &Field, m: usize) -> EdgeSpaceView {
    let mut basis: Vec<Vector> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut v = vec![0u32; 2 * m];
        v[i] = 1;
        if i > 0 {
            v[m + i - 1] = 1;
        }
        basis.push(v);
    }
    let mut last = vec![0u32; 2 * m];
    last[2 * m - 1] = 1;
    basis.push(last);
    let space = span(field, &basis, 2 * m).expect("well-formed basis");
    debug_assert_eq!(space.dim(), m + 1);
    EdgeSpaceView::new(space, m).expect("ambient is 2m")
}

/// Convenience: checks the de Bruijn graph itself over the field alphabet.
pub fn check_debruijn_linear_structure(
    field: &Field,
    m: usize,
    budget: &Budget,
) -> Result<LinearStructureResult, Error> {
    let db = DeBruijn::new(field.order() as usize, m);
    let mut edges = Vec::with_capacity(db.edge_count());
    for u in 0..db.vertex_count() {
        for v in db.successors(u) {
            edges.push((u, v));
        }
    }
    check_linear_structure(field, m, db.vertex_count(), &edges, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn debruijn_graphs_have_linear_structure() {
        let budget = Budget::default();
        for q in [2u64, 4] {
            let f = Field::new(q).unwrap();
            for m in 1..=3 {
                let res = check_debruijn_linear_structure(&f, m, &budget).unwrap();
                assert!(res.is_linear(), "q={q}, m={m}");
                if let LinearStructureResult::Linear(view) = res {
                    assert_eq!(view.subspace.dim(), m + 1);
                    assert_eq!(view.subspace, debruijn_edge_space(&f, m).subspace);
                }
            }
        }
    }

    #[test]
    fn missing_zero_edge_fails() {
        let f = Field::new(2).unwrap();
        // edge set {(0,1)} over F_2^1: no zero edge
        let res = check_linear_structure(&f, 1, 2, &[(0, 1)], &Budget::default()).unwrap();
        assert!(!res.is_linear());
    }

    #[test]
    fn complete_edge_set_is_linear() {
        let f = Field::new(2).unwrap();
        let mut edges = Vec::new();
        for u in 0..4usize {
            for v in 0..4usize {
                edges.push((u, v));
            }
        }
        let res = check_linear_structure(&f, 2, 4, &edges, &Budget::default()).unwrap();
        assert!(res.is_linear());
    }

    #[test]
    fn three_cycle_fails_over_f3() {
        let f = Field::new(3).unwrap();
        let res =
            check_linear_structure(&f, 1, 3, &[(0, 1), (1, 2), (2, 0)], &Budget::default())
                .unwrap();
        assert!(!res.is_linear());
    }

    #[test]
    fn wrong_vertex_count_is_an_error() {
        let f = Field::new(2).unwrap();
        assert!(check_linear_structure(&f, 2, 3, &[], &Budget::default()).is_err());
    }
}
