//! Statistical and exact checks of the random-subspace facts the
//! constructions rely on: disjointness of random subspaces, full rank of
//! random spans, the subspace-point sampler bound, and the equivalence of the
//! two ways of drawing a nested (A1, A2, B) triple.

use crate::budget::Budget;
use crate::error::Error;
use crate::field::Field;
use crate::rng;
use crate::space::{
    count_subspaces, enumerate_subspaces, is_disjoint, sample_subspace,
    sample_subspace_containing, sample_vector_in, span, Subspace,
};
use crate::stats::{estimate, EstimatorConfig, ExperimentReport};

/// A Monte Carlo check against a quoted probability bound. `pass` is set iff
/// the empirical frequency stays within three standard errors of the bound.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub report: ExperimentReport,
    pub bound: f64,
    pub pass: bool,
}

fn bound_check(report: ExperimentReport, bound: f64) -> BoundCheck {
    let pass = report.estimate <= bound + 3.0 * report.stderr;
    BoundCheck {
        report,
        bound,
        pass,
    }
}

/// Frequency with which a uniform d'-subspace of F_q^d intersects a fixed
/// d'-subspace nontrivially, checked against the bound 2d'/q^(d-2d').
pub fn mc_check_disjointness(
    field: &Field,
    d_prime: usize,
    d: usize,
    cfg: EstimatorConfig,
) -> Result<BoundCheck, Error> {
    if d <= 2 * d_prime {
        return Err(Error::Precondition(format!(
            "disjointness bound needs d > 2d', got d = {d}, d' = {d_prime}"
        )));
    }
    let ambient = Subspace::full(field, d);
    let fixed = span(
        field,
        &(0..d_prime)
            .map(|i| {
                let mut v = vec![0u32; d];
                v[i] = 1;
                v
            })
            .collect::<Vec<_>>(),
        d,
    )?;
    let q = field.order() as f64;
    let bound = 2.0 * d_prime as f64 / q.powi((d - 2 * d_prime) as i32);
    let params = format!("q={};d'={};d={}", field.order(), d_prime, d);
    let report = estimate(cfg, "disjointness_failure", &params, |rng| {
        let w1 = sample_subspace(field, d_prime, &ambient, rng).expect("sampling");
        !is_disjoint(field, &w1, &fixed).expect("same ambient")
    });
    Ok(bound_check(report, bound))
}

/// Exact probability that a uniform d'-subspace of F_q^d intersects the fixed
/// first-coordinates d'-subspace, by enumeration.
pub fn exact_disjointness_failure(
    field: &Field,
    d_prime: usize,
    d: usize,
    budget: &Budget,
) -> Result<f64, Error> {
    let ambient = Subspace::full(field, d);
    let fixed = span(
        field,
        &(0..d_prime)
            .map(|i| {
                let mut v = vec![0u32; d];
                v[i] = 1;
                v
            })
            .collect::<Vec<_>>(),
        d,
    )?;
    let all = enumerate_subspaces(field, d_prime, &ambient, budget)?;
    let bad = all
        .iter()
        .filter(|s| !is_disjoint(field, s, &fixed).unwrap())
        .count();
    Ok(bad as f64 / all.len() as f64)
}

/// Rate at which the span of d uniform vectors of F_q^n is rank-deficient,
/// checked against the bound d/q^(n-d).
pub fn mc_check_full_dim(
    field: &Field,
    d: usize,
    ambient_dim: usize,
    cfg: EstimatorConfig,
) -> Result<BoundCheck, Error> {
    if d > ambient_dim {
        return Err(Error::Precondition(
            "d must be at most the ambient dimension".into(),
        ));
    }
    let ambient = Subspace::full(field, ambient_dim);
    let q = field.order() as f64;
    let bound = d as f64 / q.powi((ambient_dim - d) as i32);
    let params = format!("q={};d={};n={}", field.order(), d, ambient_dim);
    let report = estimate(cfg, "rank_deficiency", &params, |rng| {
        let vectors: Vec<_> = (0..d).map(|_| sample_vector_in(field, &ambient, rng)).collect();
        span(field, &vectors, ambient_dim).expect("valid vectors").dim() < d
    });
    Ok(bound_check(report, bound))
}

/// All d-subspaces of `ambient` containing `w0`; in bijection with the
/// (d - dim w0)-subspaces of the quotient by w0, enumerated through a
/// complement basis.
pub fn enumerate_subspaces_containing(
    field: &Field,
    d: usize,
    w0: &Subspace,
    ambient: &Subspace,
    budget: &Budget,
) -> Result<Vec<Subspace>, Error> {
    if !ambient.contains_subspace(field, w0) {
        return Err(Error::Precondition("w0 not inside ambient".into()));
    }
    // complement of w0 inside ambient: greedily extend the basis
    let mut current = w0.clone();
    let mut complement: Vec<Vec<u32>> = Vec::new();
    for b in &ambient.basis {
        if !current.contains(field, b) {
            complement.push(b.clone());
            let mut rows = current.basis.clone();
            rows.push(b.clone());
            current = span(field, &rows, ambient.ambient_dim)?;
        }
    }
    debug_assert_eq!(current.dim(), ambient.dim());
    let quotient_dim = ambient.dim() - w0.dim();
    let k = d - w0.dim();
    let quotient = Subspace::full(field, quotient_dim);
    let mut out = Vec::new();
    for s in enumerate_subspaces(field, k, &quotient, budget)? {
        let mut rows = w0.basis.clone();
        for coeffs in &s.basis {
            let mut v = vec![0u32; ambient.ambient_dim];
            for (c, comp) in coeffs.iter().zip(&complement) {
                for i in 0..v.len() {
                    v[i] = field.add(v[i], field.mul(*c, comp[i]));
                }
            }
            rows.push(v);
        }
        out.push(span(field, &rows, ambient.ambient_dim)?);
    }
    Ok(out)
}

/// Sampler check: fraction of uniform d-subspaces X containing the fixed
/// d'-subspace W whose mean of `f` deviates from the global mean by more than
/// tau + q^-(d-d'), against the bound 1/(q^(d-d'-2) tau^2).
pub fn mc_check_sampler(
    field: &Field,
    d_prime: usize,
    d: usize,
    v_dim: usize,
    tau: f64,
    f: &(dyn Fn(&[u32]) -> f64 + Sync),
    cfg: EstimatorConfig,
    budget: &Budget,
) -> Result<BoundCheck, Error> {
    if !(d_prime < d && d <= v_dim) {
        return Err(Error::Precondition(
            "sampler check needs d' < d <= dim V".into(),
        ));
    }
    let ambient = Subspace::full(field, v_dim);
    let w = span(
        field,
        &(0..d_prime)
            .map(|i| {
                let mut v = vec![0u32; v_dim];
                v[i] = 1;
                v
            })
            .collect::<Vec<_>>(),
        v_dim,
    )?;
    let all_points = ambient.enumerate_points(field, budget)?;
    let global_mean: f64 =
        all_points.iter().map(|p| f(p)).sum::<f64>() / all_points.len() as f64;
    let q = field.order() as f64;
    let deviation = tau + q.powi(-((d - d_prime) as i32));
    let bound = 1.0 / (q.powi((d as i32 - d_prime as i32 - 2).max(0)) * tau * tau);
    let params = format!(
        "q={};d'={};d={};dimV={};tau={}",
        field.order(),
        d_prime,
        d,
        v_dim,
        tau
    );
    let report = estimate(cfg, "sampler_violation", &params, |rng| {
        let x = sample_subspace_containing(field, d, &w, &ambient, rng).expect("sampling");
        let pts = x.enumerate_points(field, &Budget::default()).expect("small");
        let mean: f64 = pts.iter().map(|p| f(p)).sum::<f64>() / pts.len() as f64;
        (mean - global_mean).abs() > deviation
    });
    Ok(bound_check(report, bound))
}

/// Exact violation fraction over all d-subspaces containing W.
pub fn exact_sampler_violation(
    field: &Field,
    d_prime: usize,
    d: usize,
    v_dim: usize,
    tau: f64,
    f: &dyn Fn(&[u32]) -> f64,
    budget: &Budget,
) -> Result<f64, Error> {
    let ambient = Subspace::full(field, v_dim);
    let w = span(
        field,
        &(0..d_prime)
            .map(|i| {
                let mut v = vec![0u32; v_dim];
                v[i] = 1;
                v
            })
            .collect::<Vec<_>>(),
        v_dim,
    )?;
    let all_points = ambient.enumerate_points(field, budget)?;
    let global_mean: f64 =
        all_points.iter().map(|p| f(p)).sum::<f64>() / all_points.len() as f64;
    let q = field.order() as f64;
    let deviation = tau + q.powi(-((d - d_prime) as i32));
    let subs = enumerate_subspaces_containing(field, d, &w, &ambient, budget)?;
    let violations = subs
        .iter()
        .filter(|x| {
            let pts = x.enumerate_points(field, budget).expect("small");
            let mean: f64 = pts.iter().map(|p| f(p)).sum::<f64>() / pts.len() as f64;
            (mean - global_mean).abs() > deviation
        })
        .count();
    Ok(violations as f64 / subs.len() as f64)
}

/// Exact total-variation distance as an integer fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TvDistance {
    pub numerator: u128,
    pub denominator: u128,
}

impl TvDistance {
    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Exact TV distance between the two ways of drawing a triple
/// (A1, A2, B) with A1, A2 disjoint d0-subspaces inside a d1-subspace B:
/// B first then the pair inside B, versus the pair first then B around it.
/// Computed by full enumeration with integer arithmetic.
pub fn check_triplet_equivalence(
    field: &Field,
    d0: usize,
    d1: usize,
    v_dim: usize,
    budget: &Budget,
) -> Result<TvDistance, Error> {
    if !(d0 < d1 && d1 < v_dim) {
        return Err(Error::Precondition(
            "triplet equivalence needs d0 < d1 < dim V".into(),
        ));
    }
    let q = field.order() as u64;
    let ambient = Subspace::full(field, v_dim);
    let bs = enumerate_subspaces(field, d1, &ambient, budget)?;
    let n_b = bs.len() as u128;

    // ordered disjoint d0-pairs inside one d1-subspace; the count is the same
    // for every B, so compute it on the first one
    let pairs_within = |b: &Subspace| -> Result<Vec<(Subspace, Subspace)>, Error> {
        let inner = enumerate_subspaces(field, d0, b, budget)?;
        let mut pairs = Vec::new();
        for a1 in &inner {
            for a2 in &inner {
                if is_disjoint(field, a1, a2)? {
                    pairs.push((a1.clone(), a2.clone()));
                }
            }
        }
        Ok(pairs)
    };
    let k = pairs_within(&bs[0])?.len() as u128;

    // distribution 2 normalizers: ordered disjoint pairs in V, and the number
    // of d1-subspaces containing a fixed 2d0-subspace
    let all_a = enumerate_subspaces(field, d0, &ambient, budget)?;
    let mut p_total: u128 = 0;
    for a1 in &all_a {
        for a2 in &all_a {
            if is_disjoint(field, a1, a2)? {
                p_total += 1;
            }
        }
    }
    let m_count = count_subspaces(d1 - 2 * d0, v_dim - 2 * d0, q)?; // quotient count of B ⊇ A1+A2

    let t1 = n_b * k;
    let t2 = p_total * m_count;

    // both distributions are supported on the same triples; per-triple masses
    // are 1/t1 and 1/t2
    let mut support: u128 = 0;
    for b in &bs {
        support += pairs_within(b)?.len() as u128;
    }
    let diff = t1.abs_diff(t2);
    Ok(TvDistance {
        numerator: support * diff,
        denominator: 2 * t1 * t2,
    })
}

/// Chi-square p-value for uniformity of `sample_subspace` over all
/// d-subspaces of F_q^m, at the given seed.
pub fn sample_uniformity_pvalue(
    field: &Field,
    d: usize,
    m: usize,
    trials: u64,
    seed: u64,
    budget: &Budget,
) -> Result<f64, Error> {
    let ambient = Subspace::full(field, m);
    let all = enumerate_subspaces(field, d, &ambient, budget)?;
    let index: std::collections::BTreeMap<Vec<u8>, usize> = all
        .iter()
        .enumerate()
        .map(|(i, s)| (s.canonical_key(), i))
        .collect();
    let mut counts = vec![0u64; all.len()];
    let mut r = rng::root(seed);
    for _ in 0..trials {
        let s = sample_subspace(field, d, &ambient, &mut r)?;
        counts[index[&s.canonical_key()]] += 1;
    }
    let expected = vec![trials as f64 / all.len() as f64; all.len()];
    Ok(crate::stats::chi_square_gof(&counts, &expected))
}

/// Same for `sample_subspace_containing` a fixed w0.
pub fn sample_containing_uniformity_pvalue(
    field: &Field,
    d: usize,
    w0: &Subspace,
    m: usize,
    trials: u64,
    seed: u64,
    budget: &Budget,
) -> Result<f64, Error> {
    let ambient = Subspace::full(field, m);
    let all = enumerate_subspaces_containing(field, d, w0, &ambient, budget)?;
    let index: std::collections::BTreeMap<Vec<u8>, usize> = all
        .iter()
        .enumerate()
        .map(|(i, s)| (s.canonical_key(), i))
        .collect();
    let mut counts = vec![0u64; all.len()];
    let mut r = rng::root(seed);
    for _ in 0..trials {
        let s = sample_subspace_containing(field, d, w0, &ambient, &mut r)?;
        counts[index[&s.canonical_key()]] += 1;
    }
    let expected = vec![trials as f64 / all.len() as f64; all.len()];
    Ok(crate::stats::chi_square_gof(&counts, &expected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjointness_bound_holds_and_matches_exact() {
        let f = Field::new(2).unwrap();
        let cfg = EstimatorConfig::new(20_000, 3);
        let check = mc_check_disjointness(&f, 1, 5, cfg).unwrap();
        assert!(check.pass, "freq {} vs bound {}", check.report.estimate, check.bound);
        // exact failure probability: two 1-subspaces of F_2^5 meet iff equal
        let exact = exact_disjointness_failure(&f, 1, 5, &Budget::default()).unwrap();
        assert!((exact - 1.0 / 31.0).abs() < 1e-12);
        assert!((check.report.estimate - exact).abs() <= 3.0 * check.report.stderr + 1e-9);
    }

    #[test]
    fn zero_subspace_is_disjoint_from_everything() {
        let f = Field::new(2).unwrap();
        let z = Subspace::zero(&f, 4);
        let s = span(&f, &[vec![1, 0, 0, 0]], 4).unwrap();
        assert!(is_disjoint(&f, &z, &s).unwrap());
        assert!(is_disjoint(&f, &z, &z).unwrap());
    }

    #[test]
    fn exact_sampler_violation_respects_the_bound() {
        let f = Field::new(2).unwrap();
        let budget = Budget::default();
        let half = |p: &[u32]| if p[0] == 0 { 1.0 } else { 0.0 };
        for (tau, d_prime, d, v_dim) in [(0.25, 0usize, 3usize, 5usize), (0.25, 1, 3, 5)] {
            let exact =
                exact_sampler_violation(&f, d_prime, d, v_dim, tau, &half, &budget).unwrap();
            let bound = 1.0
                / ((2.0f64).powi((d as i32 - d_prime as i32 - 2).max(0)) * tau * tau);
            assert!(exact <= bound, "exact {exact} vs bound {bound}");
        }
    }

    #[test]
    fn constant_function_never_violates_sampler() {
        let f = Field::new(2).unwrap();
        let cfg = EstimatorConfig::new(500, 5);
        let check = mc_check_sampler(
            &f,
            0,
            3,
            5,
            0.25,
            &|_p: &[u32]| 0.5,
            cfg,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(check.report.estimate, 0.0);
        assert!(check.pass);
    }

    #[test]
    fn triplet_distributions_are_identical() {
        let f = Field::new(2).unwrap();
        let tv = check_triplet_equivalence(&f, 1, 2, 3, &Budget::default()).unwrap();
        assert!(tv.is_zero(), "tv = {:?}", tv);
        assert_eq!(tv.as_f64(), 0.0);
        // degenerate inner dimension: a single choice for both subspaces
        let tv = check_triplet_equivalence(&f, 0, 2, 3, &Budget::default()).unwrap();
        assert!(tv.is_zero());
    }

    #[test]
    fn containing_enumeration_matches_quotient_count() {
        let f = Field::new(2).unwrap();
        let ambient = Subspace::full(&f, 4);
        let w0 = span(&f, &[vec![1, 1, 0, 0]], 4).unwrap();
        let subs =
            enumerate_subspaces_containing(&f, 2, &w0, &ambient, &Budget::default()).unwrap();
        assert_eq!(subs.len() as u128, count_subspaces(1, 3, 2).unwrap()); // = 7
        for s in &subs {
            assert!(s.contains_subspace(&f, &w0));
            assert_eq!(s.dim(), 2);
        }
        let keys: std::collections::BTreeSet<_> = subs.iter().map(|s| s.canonical_key()).collect();
        assert_eq!(keys.len(), subs.len());
    }

    #[test]
    fn uniformity_of_subspace_sampling() {
        let f = Field::new(2).unwrap();
        for seed in [1, 2, 3] {
            let p = sample_uniformity_pvalue(&f, 1, 3, 7000, seed, &Budget::default()).unwrap();
            assert!(p > 0.01, "seed {seed}: p = {p}");
        }
    }

    #[test]
    fn uniformity_of_containing_subspace_sampling() {
        // 2-subspaces of F_2^4 containing a fixed line: 7 candidates
        let f = Field::new(2).unwrap();
        let w0 = span(&f, &[vec![1, 1, 0, 0]], 4).unwrap();
        let candidates =
            enumerate_subspaces_containing(&f, 2, &w0, &Subspace::full(&f, 4), &Budget::default())
                .unwrap();
        assert_eq!(candidates.len(), 7);
        let p =
            sample_containing_uniformity_pvalue(&f, 2, &w0, 4, 7000, 5, &Budget::default())
                .unwrap();
        assert!(p > 0.01, "p = {p}");
    }
}
