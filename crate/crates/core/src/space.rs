//! Vectors and linear subspaces of F_q^n.
//!
//! A subspace is always held in reduced row-echelon form with pivot columns
//! strictly increasing, which makes the representation unique: structural
//! equality is subspace equality, and the canonical byte encoding is a stable
//! map key.

use crate::budget::{Budget, RETRY_CAP};
use crate::error::Error;
use crate::field::Field;
use serde::{Deserialize, Serialize};

/// Coordinate vector over a field, entries in [0, q).
pub type Vector = Vec<u32>;

/// Index of a point of the full space F_q^m under big-endian lexicographic
/// order (first coordinate most significant).
pub fn point_index(q: u32, coords: &[u32]) -> u64 {
    let mut idx = 0u64;
    for &c in coords {
        idx = idx * q as u64 + c as u64;
    }
    idx
}

/// Inverse of [`point_index`].
pub fn point_at(q: u32, m: usize, mut index: u64) -> Vector {
    let mut coords = vec![0u32; m];
    for i in (0..m).rev() {
        coords[i] = (index % q as u64) as u32;
        index /= q as u64;
    }
    coords
}

/// Row-reduce `rows` in place over `field`; returns the rank. Rows end up in
/// canonical RREF order (pivot columns ascending, zero rows removed).
fn rref(field: &Field, rows: &mut Vec<Vector>) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = field
            .inv(rows[rank][col])
            .expect("pivot is nonzero by construction");
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..width {
                    let sub = field.mul(factor, rows[rank][c]);
                    rows[r][c] = field.sub(rows[r][c], sub);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rank
}

/// A linear subspace of F_q^{ambient_dim} in canonical RREF basis form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subspace {
    pub q: u32,
    pub ambient_dim: usize,
    pub basis: Vec<Vector>,
}

impl Subspace {
    /// The zero subspace of F_q^n.
    pub fn zero(field: &Field, ambient_dim: usize) -> Subspace {
        Subspace {
            q: field.order(),
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// The full space F_q^n with the standard basis.
    pub fn full(field: &Field, ambient_dim: usize) -> Subspace {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![0u32; ambient_dim];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            q: field.order(),
            ambient_dim,
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of points, as u128 (exact for any desk-scale subspace).
    pub fn point_count(&self) -> u128 {
        (self.q as u128).pow(self.dim() as u32)
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), Error> {
        if self.ambient_dim != other.ambient_dim || self.q != other.q {
            Err(Error::AmbientMismatch)
        } else {
            Ok(())
        }
    }

    /// True iff `v` lies in the subspace.
    pub fn contains(&self, field: &Field, v: &[u32]) -> bool {
        self.coords_of(field, v).is_some()
    }

    /// Coefficients of `v` over the RREF basis, or None if `v` is outside.
    /// Reduction against an RREF basis needs one pass: each basis row is the
    /// only row with a nonzero entry in its pivot column.
    pub fn coords_of(&self, field: &Field, v: &[u32]) -> Option<Vec<u32>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        let mut rem = v.to_vec();
        let mut coords = Vec::with_capacity(self.dim());
        for row in &self.basis {
            let pivot = row.iter().position(|&x| x != 0).expect("no zero rows");
            let c = rem[pivot];
            coords.push(c);
            if c != 0 {
                for i in 0..rem.len() {
                    rem[i] = field.sub(rem[i], field.mul(c, row[i]));
                }
            }
        }
        if rem.iter().all(|&x| x == 0) {
            Some(coords)
        } else {
            None
        }
    }

    /// True iff `other` is contained in `self`.
    pub fn contains_subspace(&self, field: &Field, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(field, v))
    }

    /// The point with the given coefficient tuple over the basis.
    pub fn point_from_coords(&self, field: &Field, coords: &[u32]) -> Vector {
        debug_assert_eq!(coords.len(), self.dim());
        let mut v = vec![0u32; self.ambient_dim];
        for (c, row) in coords.iter().zip(&self.basis) {
            if *c != 0 {
                for i in 0..v.len() {
                    v[i] = field.add(v[i], field.mul(*c, row[i]));
                }
            }
        }
        v
    }

    /// All q^dim points, zero first, in lexicographic coefficient order
    /// (first basis row most significant).
    pub fn enumerate_points(&self, field: &Field, budget: &Budget) -> Result<Vec<Vector>, Error> {
        budget.check(self.point_count())?;
        let n = self.point_count() as u64;
        let mut out = Vec::with_capacity(n as usize);
        for idx in 0..n {
            let coords = point_at(self.q, self.dim(), idx);
            out.push(self.point_from_coords(field, &coords));
        }
        Ok(out)
    }

    /// Index of point `v` in [`enumerate_points`] order.
    pub fn point_index_of(&self, field: &Field, v: &[u32]) -> Option<u64> {
        self.coords_of(field, v).map(|c| point_index(self.q, &c))
    }

    /// Canonical byte encoding; equal subspaces encode identically.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.dim() * self.ambient_dim);
        out.extend_from_slice(&(self.q).to_le_bytes());
        out.extend_from_slice(&(self.ambient_dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim() as u32).to_le_bytes());
        for row in &self.basis {
            for &x in row {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }
}

/// Smallest subspace containing all of `vectors`.
pub fn span(field: &Field, vectors: &[Vector], ambient_dim: usize) -> Result<Subspace, Error> {
    for v in vectors {
        if v.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                got: v.len(),
            });
        }
        for &x in v {
            if !field.contains(x) {
                return Err(Error::NotInField(x as u64, field.order() as u64));
            }
        }
    }
    let mut rows: Vec<Vector> = vectors.to_vec();
    rref(field, &mut rows);
    Ok(Subspace {
        q: field.order(),
        ambient_dim,
        basis: rows,
    })
}

/// S1 + S2, the smallest subspace containing both.
pub fn subspace_sum(field: &Field, s1: &Subspace, s2: &Subspace) -> Result<Subspace, Error> {
    s1.check_compatible(s2)?;
    let mut rows: Vec<Vector> = s1.basis.iter().chain(&s2.basis).cloned().collect();
    rref(field, &mut rows);
    Ok(Subspace {
        q: s1.q,
        ambient_dim: s1.ambient_dim,
        basis: rows,
    })
}

/// S1 ∩ S2 by the Zassenhaus block construction: row-reduce [B1|B1; B2|0];
/// rows with zero left block carry an intersection basis in the right block.
pub fn subspace_intersect(field: &Field, s1: &Subspace, s2: &Subspace) -> Result<Subspace, Error> {
    s1.check_compatible(s2)?;
    let n = s1.ambient_dim;
    let mut rows: Vec<Vector> = Vec::with_capacity(s1.dim() + s2.dim());
    for b in &s1.basis {
        let mut row = b.clone();
        row.extend_from_slice(b);
        rows.push(row);
    }
    for b in &s2.basis {
        let mut row = b.clone();
        row.extend(std::iter::repeat_n(0, n));
        rows.push(row);
    }
    rref(field, &mut rows);
    let inter: Vec<Vector> = rows
        .iter()
        .filter(|r| r[..n].iter().all(|&x| x == 0))
        .map(|r| r[n..].to_vec())
        .collect();
    span(field, &inter, n)
}

/// True iff S1 ∩ S2 = {0}.
pub fn is_disjoint(field: &Field, s1: &Subspace, s2: &Subspace) -> Result<bool, Error> {
    Ok(subspace_intersect(field, s1, s2)?.dim() == 0)
}

/// Gaussian binomial coefficient [n choose d]_q: the number of d-subspaces
/// of F_q^n. Computed by the product formula; every partial product is itself
/// a Gaussian binomial, so the division at each step is exact.
pub fn count_subspaces(d: usize, ambient_dim: usize, q: u64) -> Result<u128, Error> {
    if d > ambient_dim {
        return Ok(0);
    }
    let mut result: u128 = 1;
    for i in 1..=d {
        let qn = (q as u128)
            .checked_pow((ambient_dim - d + i) as u32)
            .ok_or(Error::BudgetExceeded {
                required: u128::MAX,
                budget: 0,
            })?;
        let qi = (q as u128).pow(i as u32);
        result = result
            .checked_mul(qn - 1)
            .ok_or(Error::BudgetExceeded {
                required: u128::MAX,
                budget: 0,
            })?
            / (qi - 1);
    }
    Ok(result)
}

/// All d-subspaces of `ambient`, each exactly once, in a deterministic order:
/// pivot-column sets ascending lexicographically, then free entries in
/// odometer order. Enumeration happens in basis coordinates and is mapped
/// through the ambient basis.
pub fn enumerate_subspaces(
    field: &Field,
    d: usize,
    ambient: &Subspace,
    budget: &Budget,
) -> Result<Vec<Subspace>, Error> {
    let n = ambient.dim();
    let total = count_subspaces(d, n, field.order() as u64)?;
    budget.check(total)?;
    let mut out = Vec::with_capacity(total as usize);
    if d > n {
        return Ok(out);
    }
    if d == 0 {
        out.push(Subspace::zero(field, ambient.ambient_dim));
        return Ok(out);
    }

    // iterate pivot column combinations c_0 < c_1 < ... < c_{d-1}
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        // free positions: (row i, col j) with j > pivots[i], j not a pivot
        let mut free: Vec<(usize, usize)> = Vec::new();
        for i in 0..d {
            for j in (pivots[i] + 1)..n {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let q = field.order() as u64;
        let combos = q.pow(free.len() as u32);
        for code in 0..combos {
            let mut rows = vec![vec![0u32; n]; d];
            for (i, &p) in pivots.iter().enumerate() {
                rows[i][p] = 1;
            }
            let mut rem = code;
            for &(i, j) in free.iter().rev() {
                rows[i][j] = (rem % q) as u32;
                rem /= q;
            }
            // map coordinate rows through the ambient basis
            let mapped: Vec<Vector> = rows
                .iter()
                .map(|r| ambient.point_from_coords(field, r))
                .collect();
            out.push(span(field, &mapped, ambient.ambient_dim)?);
        }

        // next pivot combination
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if pivots[i] < n - (d - i) {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Uniform point of `ambient`.
pub fn sample_vector_in(field: &Field, ambient: &Subspace, rng: &mut impl rand::Rng) -> Vector {
    let coords: Vec<u32> = (0..ambient.dim()).map(|_| field.sample(rng)).collect();
    ambient.point_from_coords(field, &coords)
}

/// Uniform d-subspace of `ambient`: span d uniform vectors, retry while the
/// rank is deficient. Conditioned on full rank the span is uniform, and the
/// deficiency probability is at most d/q^(dim-d) per draw.
pub fn sample_subspace(
    field: &Field,
    d: usize,
    ambient: &Subspace,
    rng: &mut impl rand::Rng,
) -> Result<Subspace, Error> {
    if d > ambient.dim() {
        return Err(Error::Precondition(format!(
            "cannot sample a {d}-subspace of a {}-dimensional space",
            ambient.dim()
        )));
    }
    for _ in 0..RETRY_CAP {
        let vectors: Vec<Vector> = (0..d)
            .map(|_| sample_vector_in(field, ambient, rng))
            .collect();
        let s = span(field, &vectors, ambient.ambient_dim)?;
        if s.dim() == d {
            return Ok(s);
        }
    }
    Err(Error::RetryCapExceeded {
        cap: RETRY_CAP,
        context: "sample_subspace".into(),
    })
}

/// Uniform d-subspace of `ambient` containing `w0`: extend w0's basis by
/// uniform vectors, retry on rank deficiency.
pub fn sample_subspace_containing(
    field: &Field,
    d: usize,
    w0: &Subspace,
    ambient: &Subspace,
    rng: &mut impl rand::Rng,
) -> Result<Subspace, Error> {
    w0.check_compatible(ambient)?;
    if !ambient.contains_subspace(field, w0) {
        return Err(Error::Precondition(
            "w0 is not contained in the ambient space".into(),
        ));
    }
    if d < w0.dim() || d > ambient.dim() {
        return Err(Error::Precondition(format!(
            "need dim w0 = {} <= d = {d} <= dim ambient = {}",
            w0.dim(),
            ambient.dim()
        )));
    }
    for _ in 0..RETRY_CAP {
        let mut vectors = w0.basis.clone();
        for _ in 0..(d - w0.dim()) {
            vectors.push(sample_vector_in(field, ambient, rng));
        }
        let s = span(field, &vectors, ambient.ambient_dim)?;
        if s.dim() == d {
            return Ok(s);
        }
    }
    Err(Error::RetryCapExceeded {
        cap: RETRY_CAP,
        context: "sample_subspace_containing".into(),
    })
}

/// Which endpoint of an edge vector to project onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A subspace of the edge space F_q^{2m}, viewed as a set of vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpaceView {
    pub subspace: Subspace,
    pub m: usize,
}

impl EdgeSpaceView {
    pub fn new(subspace: Subspace, m: usize) -> Result<EdgeSpaceView, Error> {
        if subspace.ambient_dim != 2 * m {
            return Err(Error::DimensionMismatch {
                expected: 2 * m,
                got: subspace.ambient_dim,
            });
        }
        Ok(EdgeSpaceView { subspace, m })
    }

    /// Image of the subspace under the left (or right) endpoint projection;
    /// the image of a subspace under a linear map is the span of the
    /// projected basis.
    pub fn project_side(&self, field: &Field, side: Side) -> Subspace {
        let projected: Vec<Vector> = self
            .subspace
            .basis
            .iter()
            .map(|row| match side {
                Side::Left => row[..self.m].to_vec(),
                Side::Right => row[self.m..].to_vec(),
            })
            .collect();
        span(field, &projected, self.m).expect("projection preserves dimensions")
    }
}

/// Left endpoint of an edge vector.
pub fn edge_left(e: &[u32], m: usize) -> &[u32] {
    &e[..m]
}

/// Right endpoint of an edge vector.
pub fn edge_right(e: &[u32], m: usize) -> &[u32] {
    &e[m..]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2).unwrap()
    }

    #[test]
    fn span_of_nothing_is_zero() {
        let f = f2();
        let s = span(&f, &[], 3).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s, Subspace::zero(&f, 3));
    }

    #[test]
    fn span_standard_basis_is_full() {
        let f = f2();
        let s = span(&f, &[vec![1, 0], vec![0, 1]], 2).unwrap();
        assert_eq!(s, Subspace::full(&f, 2));
    }

    #[test]
    fn span_detects_dependence() {
        // third vector is the sum of the first two
        let f = f2();
        let s = span(&f, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn span_rejects_wrong_length() {
        let f = f2();
        assert!(span(&f, &[vec![1, 0]], 3).is_err());
    }

    #[test]
    fn sum_and_intersection_dimensions() {
        let f = f2();
        let s1 = span(&f, &[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap();
        let s2 = span(&f, &[vec![0, 1, 0], vec![0, 0, 1]], 3).unwrap();
        let sum = subspace_sum(&f, &s1, &s2).unwrap();
        let inter = subspace_intersect(&f, &s1, &s2).unwrap();
        assert_eq!(sum.dim(), 3);
        assert_eq!(inter, span(&f, &[vec![0, 1, 0]], 3).unwrap());
        assert!(!is_disjoint(&f, &s1, &s2).unwrap());
        // dim(S1+S2) = dim S1 + dim S2 - dim(S1 ∩ S2)
        assert_eq!(sum.dim(), s1.dim() + s2.dim() - inter.dim());
    }

    #[test]
    fn sum_with_zero_is_identity() {
        let f = f2();
        let s = span(&f, &[vec![1, 1, 0]], 3).unwrap();
        let z = Subspace::zero(&f, 3);
        assert_eq!(subspace_sum(&f, &s, &z).unwrap(), s);
    }

    #[test]
    fn distinct_lines_in_plane() {
        let f = f2();
        let s1 = span(&f, &[vec![1, 0]], 2).unwrap();
        let s2 = span(&f, &[vec![0, 1]], 2).unwrap();
        assert_eq!(subspace_sum(&f, &s1, &s2).unwrap().dim(), 2);
        assert!(is_disjoint(&f, &s1, &s2).unwrap());
    }

    #[test]
    fn enumerate_points_counts_and_uniqueness() {
        let budget = Budget::default();
        let f = f2();
        let z = Subspace::zero(&f, 4);
        assert_eq!(z.enumerate_points(&f, &budget).unwrap(), vec![vec![0; 4]]);

        let s = span(&f, &[vec![1, 0, 0], vec![0, 1, 1]], 3).unwrap();
        let pts = s.enumerate_points(&f, &budget).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], vec![0, 0, 0]);

        let f3 = Field::new(3).unwrap();
        let s3 = span(&f3, &[vec![1, 0], vec![0, 1]], 2).unwrap();
        let pts3 = s3.enumerate_points(&f3, &budget).unwrap();
        assert_eq!(pts3.len(), 9);
        let set: std::collections::BTreeSet<_> = pts3.iter().cloned().collect();
        assert_eq!(set.len(), 9);
    }

    #[test]
    fn point_index_roundtrip() {
        let f = Field::new(4).unwrap();
        let s = span(&f, &[vec![1, 0, 2], vec![0, 1, 3]], 3).unwrap();
        let pts = s.enumerate_points(&f, &Budget::default()).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(s.point_index_of(&f, p), Some(i as u64));
        }
        assert_eq!(s.point_index_of(&f, &[1, 0, 0]), None);
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(count_subspaces(0, 5, 2).unwrap(), 1);
        assert_eq!(count_subspaces(2, 4, 2).unwrap(), 35);
        assert_eq!(count_subspaces(1, 2, 3).unwrap(), 4);
        assert_eq!(count_subspaces(3, 2, 2).unwrap(), 0);
        // symmetric: [n choose d] = [n choose n-d]
        assert_eq!(
            count_subspaces(2, 5, 3).unwrap(),
            count_subspaces(3, 5, 3).unwrap()
        );
    }

    #[test]
    fn enumeration_matches_count() {
        let budget = Budget::default();
        let f = f2();
        let full = Subspace::full(&f, 4);
        let subs = enumerate_subspaces(&f, 2, &full, &budget).unwrap();
        assert_eq!(subs.len(), 35);
        let set: std::collections::BTreeSet<_> = subs.iter().map(|s| s.canonical_key()).collect();
        assert_eq!(set.len(), 35);
        for s in &subs {
            assert_eq!(s.dim(), 2);
        }

        let f3 = Field::new(3).unwrap();
        let full3 = Subspace::full(&f3, 2);
        let subs3 = enumerate_subspaces(&f3, 1, &full3, &budget).unwrap();
        assert_eq!(subs3.len(), 4);

        // enumeration within a proper ambient subspace
        let amb = span(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1]], 4).unwrap();
        let inner = enumerate_subspaces(&f, 1, &amb, &budget).unwrap();
        assert_eq!(inner.len() as u128, count_subspaces(1, 3, 2).unwrap());
        for s in &inner {
            assert!(amb.contains_subspace(&f, s));
        }
    }

    #[test]
    fn sampling_respects_containment_and_dimension() {
        let f = f2();
        let full = Subspace::full(&f, 4);
        let mut rng = crate::rng::root(11);
        let w0 = span(&f, &[vec![1, 1, 0, 0]], 4).unwrap();
        for _ in 0..50 {
            let s = sample_subspace(&f, 2, &full, &mut rng).unwrap();
            assert_eq!(s.dim(), 2);
            let t = sample_subspace_containing(&f, 2, &w0, &full, &mut rng).unwrap();
            assert_eq!(t.dim(), 2);
            assert!(t.contains_subspace(&f, &w0));
        }
        // d = dim w0 returns w0 itself
        let t = sample_subspace_containing(&f, 1, &w0, &full, &mut rng).unwrap();
        assert_eq!(t, w0);
        // d = dim ambient returns the ambient
        let t = sample_subspace(&f, 4, &full, &mut rng).unwrap();
        assert_eq!(t, full);
    }

    #[test]
    fn projections_of_edge_subspaces() {
        let f = f2();
        let m = 2;
        // E_a = span{(1,0 | 0,1)}: left = span{(1,0)}, right = span{(0,1)}
        let e = EdgeSpaceView::new(span(&f, &[vec![1, 0, 0, 1]], 4).unwrap(), m).unwrap();
        assert_eq!(
            e.project_side(&f, Side::Left),
            span(&f, &[vec![1, 0]], 2).unwrap()
        );
        assert_eq!(
            e.project_side(&f, Side::Right),
            span(&f, &[vec![0, 1]], 2).unwrap()
        );

        // zero edge subspace projects to zero
        let z = EdgeSpaceView::new(Subspace::zero(&f, 4), m).unwrap();
        assert_eq!(z.project_side(&f, Side::Left).dim(), 0);

        // the full edge space projects onto the full vertex space on both sides
        let full = EdgeSpaceView::new(Subspace::full(&f, 4), m).unwrap();
        assert_eq!(full.project_side(&f, Side::Left), Subspace::full(&f, 2));
        assert_eq!(full.project_side(&f, Side::Right), Subspace::full(&f, 2));
    }

    #[test]
    fn canonical_form_is_stable() {
        let f = f2();
        let a = span(&f, &[vec![1, 1, 0], vec![0, 1, 1]], 3).unwrap();
        let b = span(&f, &[vec![1, 0, 1], vec![0, 1, 1]], 3).unwrap();
        assert_eq!(a, b); // same subspace, different generating sets
        let re = span(&f, &a.basis, 3).unwrap();
        assert_eq!(re, a); // re-canonicalizing is a no-op
    }
}
