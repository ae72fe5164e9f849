//! Direct-product encoders over subspaces and the two-query consistency
//! tests between nested or paired restrictions (the P-, S-, and P2-tests),
//! with corruption models, Monte Carlo acceptance estimation, and exact
//! micro-scale enumeration.

use crate::budget::{Budget, RETRY_CAP};
use crate::error::Error;
use crate::field::Field;
use crate::rng::{self, ChaCha8Rng};
use crate::space::{
    is_disjoint, point_index, sample_subspace, subspace_sum, Subspace,
};
use crate::stats::{estimate, EstimatorConfig, ExperimentReport};
use rand::Rng;
use std::collections::BTreeMap;

/// Proof symbol. Wide enough to hold encoded tuple labels of embedded graphs.
pub type Sym = u64;

/// A local function: values over the points of a subspace, in enumeration
/// order.
pub type LocalFn = Vec<Sym>;

/// Which test a query or an assignment targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpKind {
    P,
    S,
    P2,
}

/// Query to a subspace assignment: a single subspace or an ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpQuery {
    Space(Subspace),
    Pair(Subspace, Subspace),
}

impl DpQuery {
    pub fn key(&self) -> Vec<u8> {
        match self {
            DpQuery::Space(s) => {
                let mut k = vec![1u8];
                k.extend(s.canonical_key());
                k
            }
            DpQuery::Pair(a, b) => {
                let mut k = vec![2u8];
                k.extend(a.canonical_key());
                k.extend(b.canonical_key());
                k
            }
        }
    }
}

/// Oracle answer. `Refuse` is a distinguished value every test rejects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpAnswer {
    Fn(LocalFn),
    Pair(LocalFn, LocalFn),
    Refuse,
}

/// Restriction of a global assignment to the points of a subspace.
pub fn restrict(field: &Field, pi: &[Sym], s: &Subspace) -> LocalFn {
    let pts = s
        .enumerate_points(field, &Budget::default())
        .expect("query subspaces are small");
    pts.iter()
        .map(|p| pi[point_index(field.order(), p) as usize])
        .collect()
}

/// Subspace assignments: honest direct products, memo-free deterministic
/// corruptions of them, tables, and randomized oracles.
#[derive(Debug, Clone)]
pub enum DpOracle {
    /// Answers every subspace with the restriction of a fixed assignment.
    HonestP { pi: Vec<Sym> },
    /// Answers pairs with pair restrictions and single spaces with
    /// restrictions of a fixed assignment.
    HonestS { pi: Vec<Sym> },
    /// Answers pairs with restrictions of two fixed assignments.
    HonestP2 { pi1: Vec<Sym>, pi2: Vec<Sym> },
    /// Explicit table with a fallback for missing keys.
    Table {
        entries: BTreeMap<Vec<u8>, DpAnswer>,
        fallback: Box<DpOracle>,
    },
    /// Fresh uniform answer per invocation.
    Randomized { sigma: u64 },
    /// Flips each answer value to a uniformly chosen different symbol with
    /// probability p, deterministically per query key.
    PointNoise {
        inner: Box<DpOracle>,
        p: f64,
        sigma: u64,
        seed: u64,
    },
    /// Replaces whole answers by uniform tables with the given probability,
    /// deterministically per query key.
    BlockReplace {
        inner: Box<DpOracle>,
        fraction: f64,
        sigma: u64,
        seed: u64,
    },
    /// Answers from one of two worlds, chosen per query key by a hash bit.
    SplitWorld {
        a: Box<DpOracle>,
        b: Box<DpOracle>,
        seed: u64,
    },
    /// Refuses everything.
    RefuseAll,
}

impl DpOracle {
    /// True iff answers depend only on the query (exact enumeration needs
    /// this).
    pub fn is_deterministic(&self) -> bool {
        match self {
            DpOracle::Randomized { .. } => false,
            DpOracle::Table { fallback, .. } => fallback.is_deterministic(),
            DpOracle::PointNoise { inner, .. } | DpOracle::BlockReplace { inner, .. } => {
                inner.is_deterministic()
            }
            DpOracle::SplitWorld { a, b, .. } => a.is_deterministic() && b.is_deterministic(),
            _ => true,
        }
    }

    pub fn query(&self, field: &Field, q: &DpQuery, rng: &mut ChaCha8Rng) -> DpAnswer {
        match self {
            DpOracle::HonestP { pi } | DpOracle::HonestS { pi } => match q {
                DpQuery::Space(s) => DpAnswer::Fn(restrict(field, pi, s)),
                DpQuery::Pair(s1, s2) => {
                    DpAnswer::Pair(restrict(field, pi, s1), restrict(field, pi, s2))
                }
            },
            DpOracle::HonestP2 { pi1, pi2 } => match q {
                DpQuery::Space(s) => DpAnswer::Fn(restrict(field, pi1, s)),
                DpQuery::Pair(s1, s2) => {
                    DpAnswer::Pair(restrict(field, pi1, s1), restrict(field, pi2, s2))
                }
            },
            DpOracle::Table { entries, fallback } => entries
                .get(&q.key())
                .cloned()
                .unwrap_or_else(|| fallback.query(field, q, rng)),
            DpOracle::Randomized { sigma } => {
                let fresh = |s: &Subspace, rng: &mut ChaCha8Rng| -> LocalFn {
                    (0..s.point_count() as usize)
                        .map(|_| rng.gen_range(0..*sigma))
                        .collect()
                };
                match q {
                    DpQuery::Space(s) => DpAnswer::Fn(fresh(s, rng)),
                    DpQuery::Pair(s1, s2) => DpAnswer::Pair(fresh(s1, rng), fresh(s2, rng)),
                }
            }
            DpOracle::PointNoise {
                inner,
                p,
                sigma,
                seed,
            } => {
                let mut ans = inner.query(field, q, rng);
                let mut key_rng = rng::keyed_stream(*seed, &q.key());
                let corrupt = |f: &mut LocalFn, key_rng: &mut ChaCha8Rng| {
                    for v in f.iter_mut() {
                        if key_rng.gen_bool(*p) && *sigma > 1 {
                            let shift = key_rng.gen_range(1..*sigma);
                            *v = (*v + shift) % *sigma;
                        }
                    }
                };
                match &mut ans {
                    DpAnswer::Fn(f) => corrupt(f, &mut key_rng),
                    DpAnswer::Pair(f, g) => {
                        corrupt(f, &mut key_rng);
                        corrupt(g, &mut key_rng);
                    }
                    DpAnswer::Refuse => {}
                }
                ans
            }
            DpOracle::BlockReplace {
                inner,
                fraction,
                sigma,
                seed,
            } => {
                let mut key_rng = rng::keyed_stream(*seed, &q.key());
                if key_rng.gen_bool(*fraction) {
                    let fresh = |s: &Subspace, r: &mut ChaCha8Rng| -> LocalFn {
                        (0..s.point_count() as usize)
                            .map(|_| r.gen_range(0..*sigma))
                            .collect()
                    };
                    match q {
                        DpQuery::Space(s) => DpAnswer::Fn(fresh(s, &mut key_rng)),
                        DpQuery::Pair(s1, s2) => {
                            DpAnswer::Pair(fresh(s1, &mut key_rng), fresh(s2, &mut key_rng))
                        }
                    }
                } else {
                    inner.query(field, q, rng)
                }
            }
            DpOracle::SplitWorld { a, b, seed } => {
                let bit = rng::fnv1a(&q.key()) ^ seed;
                if bit & 1 == 0 {
                    a.query(field, q, rng)
                } else {
                    b.query(field, q, rng)
                }
            }
            DpOracle::RefuseAll => DpAnswer::Refuse,
        }
    }
}

/// Honest encoder for the nested-subspace test.
pub fn encode_p(pi: Vec<Sym>) -> DpOracle {
    DpOracle::HonestP { pi }
}

/// Honest encoder for the disjoint-pair test.
pub fn encode_s(pi: Vec<Sym>) -> DpOracle {
    DpOracle::HonestS { pi }
}

/// Honest encoder for the independent-pair test.
pub fn encode_p2(pi1: Vec<Sym>, pi2: Vec<Sym>) -> DpOracle {
    DpOracle::HonestP2 { pi1, pi2 }
}

/// Everything needed to re-verify a verdict: the sampled subspaces and both
/// oracle answers.
#[derive(Debug, Clone)]
pub enum Transcript {
    P {
        b: Subspace,
        a: Subspace,
        ans_b: DpAnswer,
        ans_a: DpAnswer,
    },
    S {
        b1: Subspace,
        b2: Subspace,
        a1: Subspace,
        a2: Subspace,
        a_sum: Subspace,
        ans_pair: DpAnswer,
        ans_a: DpAnswer,
    },
    P2 {
        b1: Subspace,
        b2: Subspace,
        a1: Subspace,
        a2: Subspace,
        ans_b: DpAnswer,
        ans_a: DpAnswer,
    },
}

/// Outcome of a single test run.
#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub accepted: bool,
    pub transcript: Transcript,
}

/// Checks `sub_vals` (a function on `sub`) against `super_vals` (a function
/// on `sup` containing it), pointwise. Restrictions to the zero subspace are
/// treated as empty and never compared.
fn restriction_matches(
    field: &Field,
    sup: &Subspace,
    super_vals: &LocalFn,
    sub: &Subspace,
    sub_vals: &LocalFn,
) -> Result<bool, Error> {
    if sub.dim() == 0 {
        return Ok(true);
    }
    let pts = sub.enumerate_points(field, &Budget::default())?;
    if sub_vals.len() != pts.len() {
        return Err(Error::MalformedAnswer(format!(
            "answer has {} values for a subspace with {} points",
            sub_vals.len(),
            pts.len()
        )));
    }
    for (i, p) in pts.iter().enumerate() {
        let j = sup
            .point_index_of(field, p)
            .ok_or_else(|| Error::MalformedAnswer("nested point missing from superspace".into()))?;
        let sv = super_vals.get(j as usize).ok_or_else(|| {
            Error::MalformedAnswer("answer is shorter than the superspace".into())
        })?;
        if *sv != sub_vals[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

impl Transcript {
    /// Recomputes the verdict from the recorded subspaces and answers.
    pub fn verdict(&self, field: &Field) -> Result<bool, Error> {
        match self {
            Transcript::P { b, a, ans_b, ans_a } => match (ans_b, ans_a) {
                (DpAnswer::Fn(bv), DpAnswer::Fn(av)) => restriction_matches(field, b, bv, a, av),
                _ => Ok(false),
            },
            Transcript::S {
                b1,
                b2,
                a1,
                a2,
                a_sum,
                ans_pair,
                ans_a,
            } => match (ans_pair, ans_a) {
                (DpAnswer::Pair(bv1, bv2), DpAnswer::Fn(av)) => {
                    // compare both sides against the label of A1 + A2
                    let a1v: LocalFn = if a1.dim() == 0 {
                        Vec::new()
                    } else {
                        a1.enumerate_points(field, &Budget::default())?
                            .iter()
                            .map(|p| {
                                a_sum
                                    .point_index_of(field, p)
                                    .map(|i| av.get(i as usize).copied())
                            })
                            .collect::<Option<Option<Vec<_>>>>()
                            .flatten()
                            .ok_or_else(|| {
                                Error::MalformedAnswer("sum answer too short".into())
                            })?
                    };
                    let a2v: LocalFn = if a2.dim() == 0 {
                        Vec::new()
                    } else {
                        a2.enumerate_points(field, &Budget::default())?
                            .iter()
                            .map(|p| {
                                a_sum
                                    .point_index_of(field, p)
                                    .map(|i| av.get(i as usize).copied())
                            })
                            .collect::<Option<Option<Vec<_>>>>()
                            .flatten()
                            .ok_or_else(|| {
                                Error::MalformedAnswer("sum answer too short".into())
                            })?
                    };
                    if a1.dim() == 0 {
                        return Ok(true);
                    }
                    Ok(restriction_matches(field, b1, bv1, a1, &a1v)?
                        && restriction_matches(field, b2, bv2, a2, &a2v)?)
                }
                _ => Ok(false),
            },
            Transcript::P2 {
                b1,
                b2,
                a1,
                a2,
                ans_b,
                ans_a,
            } => match (ans_b, ans_a) {
                (DpAnswer::Pair(bv1, bv2), DpAnswer::Pair(av1, av2)) => {
                    Ok(restriction_matches(field, b1, bv1, a1, av1)?
                        && restriction_matches(field, b2, bv2, a2, av2)?)
                }
                _ => Ok(false),
            },
        }
    }
}

/// One run of the nested-subspace test: B uniform d1-subspace, A uniform
/// d0-subspace of B, accept iff the two answers agree on A.
pub fn run_p_test(
    field: &Field,
    oracle: &DpOracle,
    d0: usize,
    d1: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TestOutcome, Error> {
    if !(d0 < d1 && d1 <= m) {
        return Err(Error::Precondition("need d0 < d1 <= m".into()));
    }
    let full = Subspace::full(field, m);
    let b = sample_subspace(field, d1, &full, rng)?;
    let a = sample_subspace(field, d0, &b, rng)?;
    let ans_b = oracle.query(field, &DpQuery::Space(b.clone()), rng);
    let ans_a = oracle.query(field, &DpQuery::Space(a.clone()), rng);
    let transcript = Transcript::P {
        b,
        a,
        ans_b,
        ans_a,
    };
    let accepted = transcript.verdict(field)?;
    Ok(TestOutcome {
        accepted,
        transcript,
    })
}

/// Uniform disjoint pair of d1-subspaces, by joint rejection.
pub fn sample_disjoint_pair(
    field: &Field,
    d1: usize,
    full: &Subspace,
    rng: &mut ChaCha8Rng,
) -> Result<(Subspace, Subspace), Error> {
    for _ in 0..RETRY_CAP {
        let b1 = sample_subspace(field, d1, full, rng)?;
        let b2 = sample_subspace(field, d1, full, rng)?;
        if is_disjoint(field, &b1, &b2)? {
            return Ok((b1, b2));
        }
    }
    Err(Error::RetryCapExceeded {
        cap: RETRY_CAP,
        context: "sample_disjoint_pair".into(),
    })
}

/// One run of the disjoint-pair test: disjoint B1, B2; A1 inside B1, A2
/// inside B2; accept iff the pair answer agrees with the answer on A1 + A2.
pub fn run_s_test(
    field: &Field,
    oracle: &DpOracle,
    d0: usize,
    d1: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TestOutcome, Error> {
    if !(d0 < d1 && 2 * d1 <= m) {
        return Err(Error::Precondition("need d0 < d1 and 2 d1 <= m".into()));
    }
    let full = Subspace::full(field, m);
    let (b1, b2) = sample_disjoint_pair(field, d1, &full, rng)?;
    let a1 = sample_subspace(field, d0, &b1, rng)?;
    let a2 = sample_subspace(field, d0, &b2, rng)?;
    let a_sum = subspace_sum(field, &a1, &a2)?;
    let ans_pair = oracle.query(field, &DpQuery::Pair(b1.clone(), b2.clone()), rng);
    let ans_a = oracle.query(field, &DpQuery::Space(a_sum.clone()), rng);
    let transcript = Transcript::S {
        b1,
        b2,
        a1,
        a2,
        a_sum,
        ans_pair,
        ans_a,
    };
    let accepted = transcript.verdict(field)?;
    Ok(TestOutcome {
        accepted,
        transcript,
    })
}

/// One run of the independent-pair test: B1, B2 independent (not necessarily
/// disjoint); accept iff the pair answers agree on (A1, A2).
pub fn run_p2_test(
    field: &Field,
    oracle: &DpOracle,
    d0: usize,
    d1: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TestOutcome, Error> {
    if !(d0 < d1 && d1 <= m) {
        return Err(Error::Precondition("need d0 < d1 <= m".into()));
    }
    let full = Subspace::full(field, m);
    let b1 = sample_subspace(field, d1, &full, rng)?;
    let b2 = sample_subspace(field, d1, &full, rng)?;
    let a1 = sample_subspace(field, d0, &b1, rng)?;
    let a2 = sample_subspace(field, d0, &b2, rng)?;
    let ans_b = oracle.query(field, &DpQuery::Pair(b1.clone(), b2.clone()), rng);
    let ans_a = oracle.query(field, &DpQuery::Pair(a1.clone(), a2.clone()), rng);
    let transcript = Transcript::P2 {
        b1,
        b2,
        a1,
        a2,
        ans_b,
        ans_a,
    };
    let accepted = transcript.verdict(field)?;
    Ok(TestOutcome {
        accepted,
        transcript,
    })
}

/// Fraction of the common domain where f and g differ; exact.
pub fn relative_distance(f: &[Sym], g: &[Sym]) -> Result<f64, Error> {
    if f.len() != g.len() {
        return Err(Error::MalformedAnswer(
            "distance of functions with different domains".into(),
        ));
    }
    if f.is_empty() {
        return Ok(0.0);
    }
    let diff = f.iter().zip(g).filter(|(a, b)| a != b).count();
    Ok(diff as f64 / f.len() as f64)
}

/// True iff f and g differ on at most an alpha fraction of the domain.
pub fn apx(f: &[Sym], g: &[Sym], alpha: f64) -> Result<bool, Error> {
    Ok(relative_distance(f, g)? <= alpha)
}

/// Monte Carlo acceptance estimate of a test against an oracle.
pub fn estimate_acceptance(
    field: &Field,
    kind: DpKind,
    oracle: &DpOracle,
    d0: usize,
    d1: usize,
    m: usize,
    cfg: EstimatorConfig,
) -> ExperimentReport {
    let params = format!(
        "q={};m={};d0={};d1={}",
        field.order(),
        m,
        d0,
        d1
    );
    let name = match kind {
        DpKind::P => "p_test",
        DpKind::S => "s_test",
        DpKind::P2 => "p2_test",
    };
    estimate(cfg, name, &params, |rng| {
        let outcome = match kind {
            DpKind::P => run_p_test(field, oracle, d0, d1, m, rng),
            DpKind::S => run_s_test(field, oracle, d0, d1, m, rng),
            DpKind::P2 => run_p2_test(field, oracle, d0, d1, m, rng),
        };
        outcome.map(|o| o.accepted).unwrap_or(false)
    })
}

/// Exact acceptance probability by enumerating every test choice. Requires a
/// deterministic oracle.
pub fn exact_acceptance(
    field: &Field,
    kind: DpKind,
    oracle: &DpOracle,
    d0: usize,
    d1: usize,
    m: usize,
    budget: &Budget,
) -> Result<f64, Error> {
    if !oracle.is_deterministic() {
        return Err(Error::Precondition(
            "exact enumeration needs a deterministic oracle".into(),
        ));
    }
    let mut throwaway = rng::root(0);
    let full = Subspace::full(field, m);
    let bs = crate::space::enumerate_subspaces(field, d1, &full, budget)?;
    let mut accepted = 0u64;
    let mut total = 0u64;
    match kind {
        DpKind::P => {
            for b in &bs {
                for a in crate::space::enumerate_subspaces(field, d0, b, budget)? {
                    let ans_b = oracle.query(field, &DpQuery::Space(b.clone()), &mut throwaway);
                    let ans_a = oracle.query(field, &DpQuery::Space(a.clone()), &mut throwaway);
                    let t = Transcript::P {
                        b: b.clone(),
                        a,
                        ans_b,
                        ans_a,
                    };
                    total += 1;
                    if t.verdict(field)? {
                        accepted += 1;
                    }
                }
            }
        }
        DpKind::S => {
            for b1 in &bs {
                for b2 in &bs {
                    if !is_disjoint(field, b1, b2)? {
                        continue;
                    }
                    let a1s = crate::space::enumerate_subspaces(field, d0, b1, budget)?;
                    let a2s = crate::space::enumerate_subspaces(field, d0, b2, budget)?;
                    for a1 in &a1s {
                        for a2 in &a2s {
                            let a_sum = subspace_sum(field, a1, a2)?;
                            let ans_pair = oracle.query(
                                field,
                                &DpQuery::Pair(b1.clone(), b2.clone()),
                                &mut throwaway,
                            );
                            let ans_a =
                                oracle.query(field, &DpQuery::Space(a_sum.clone()), &mut throwaway);
                            let t = Transcript::S {
                                b1: b1.clone(),
                                b2: b2.clone(),
                                a1: a1.clone(),
                                a2: a2.clone(),
                                a_sum,
                                ans_pair,
                                ans_a,
                            };
                            total += 1;
                            if t.verdict(field)? {
                                accepted += 1;
                            }
                        }
                    }
                }
            }
        }
        DpKind::P2 => {
            for b1 in &bs {
                for b2 in &bs {
                    let a1s = crate::space::enumerate_subspaces(field, d0, b1, budget)?;
                    let a2s = crate::space::enumerate_subspaces(field, d0, b2, budget)?;
                    for a1 in &a1s {
                        for a2 in &a2s {
                            let ans_b = oracle.query(
                                field,
                                &DpQuery::Pair(b1.clone(), b2.clone()),
                                &mut throwaway,
                            );
                            let ans_a = oracle.query(
                                field,
                                &DpQuery::Pair(a1.clone(), a2.clone()),
                                &mut throwaway,
                            );
                            let t = Transcript::P2 {
                                b1: b1.clone(),
                                b2: b2.clone(),
                                a1: a1.clone(),
                                a2: a2.clone(),
                                ans_b,
                                ans_a,
                            };
                            total += 1;
                            if t.verdict(field)? {
                                accepted += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(accepted as f64 / total.max(1) as f64)
}

/// Decodes an assignment from a subspace oracle by per-point plurality over
/// sampled d1-subspace answers; ties break to the smallest symbol.
pub fn plurality_decode(
    field: &Field,
    oracle: &DpOracle,
    d1: usize,
    m: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Sym>, Error> {
    let full = Subspace::full(field, m);
    let total_points = (field.order() as u64).pow(m as u32) as usize;
    let mut votes: Vec<BTreeMap<Sym, u64>> = vec![BTreeMap::new(); total_points];
    for _ in 0..samples {
        let b = sample_subspace(field, d1, &full, rng)?;
        if let DpAnswer::Fn(vals) = oracle.query(field, &DpQuery::Space(b.clone()), rng) {
            let pts = b.enumerate_points(field, &Budget::default())?;
            for (i, p) in pts.iter().enumerate() {
                let idx = point_index(field.order(), p) as usize;
                *votes[idx].entry(vals[i]).or_insert(0) += 1;
            }
        }
    }
    Ok(votes
        .into_iter()
        .map(|v| {
            v.into_iter()
                .max_by(|(s1, c1), (s2, c2)| c1.cmp(c2).then(s2.cmp(s1)))
                .map(|(s, _)| s)
                .unwrap_or(0)
        })
        .collect())
}

/// Freezes a deterministic oracle into an explicit table over every subspace
/// query that a test with these parameters can make.
pub fn tabulate(
    field: &Field,
    kind: DpKind,
    oracle: &DpOracle,
    d0: usize,
    d1: usize,
    m: usize,
    budget: &Budget,
) -> Result<DpOracle, Error> {
    let mut throwaway = rng::root(0);
    let full = Subspace::full(field, m);
    let mut entries = BTreeMap::new();
    let mut put = |q: DpQuery, oracle: &DpOracle, throwaway: &mut ChaCha8Rng, field: &Field| {
        let ans = oracle.query(field, &q, throwaway);
        entries.insert(q.key(), ans);
    };
    match kind {
        DpKind::P => {
            for d in [d0, d1] {
                for s in crate::space::enumerate_subspaces(field, d, &full, budget)? {
                    put(DpQuery::Space(s), oracle, &mut throwaway, field);
                }
            }
        }
        DpKind::S => {
            let bs = crate::space::enumerate_subspaces(field, d1, &full, budget)?;
            for b1 in &bs {
                for b2 in &bs {
                    if is_disjoint(field, b1, b2)? {
                        put(
                            DpQuery::Pair(b1.clone(), b2.clone()),
                            oracle,
                            &mut throwaway,
                            field,
                        );
                    }
                }
            }
            for s in crate::space::enumerate_subspaces(field, 2 * d0, &full, budget)? {
                put(DpQuery::Space(s), oracle, &mut throwaway, field);
            }
        }
        DpKind::P2 => {
            for d in [d0, d1] {
                let spaces = crate::space::enumerate_subspaces(field, d, &full, budget)?;
                for s1 in &spaces {
                    for s2 in &spaces {
                        put(
                            DpQuery::Pair(s1.clone(), s2.clone()),
                            oracle,
                            &mut throwaway,
                            field,
                        );
                    }
                }
            }
        }
    }
    Ok(DpOracle::Table {
        entries,
        fallback: Box::new(DpOracle::RefuseAll),
    })
}
