//! The invariant suite: a fast pass over every subsystem's checkable
//! properties. Exits with code 4 on any failure.

use pcp_forge_core::budget::Budget;
use pcp_forge_core::debruijn::linear::check_debruijn_linear_structure;
use pcp_forge_core::debruijn::routing::route_permutation;
use pcp_forge_core::debruijn::{embed::embed, DeBruijn};
use pcp_forge_core::decoding::build::udpcp_to_vertex_decoding_graph;
use pcp_forge_core::decoding::circuit::random_satisfiable_circuit;
use pcp_forge_core::decoding::embed::embed_decoding;
use pcp_forge_core::decoding::pcpp::{pcpp_to_udpcp, toy_pcpp};
use pcp_forge_core::decoding::{eval_decoding, smoothness};
use pcp_forge_core::derand::{estimate_product_sat, lift_assignment, random_planted_linear_graph};
use pcp_forge_core::dp::{encode_p, encode_p2, encode_s, estimate_acceptance, DpKind};
use pcp_forge_core::field::Field;
use pcp_forge_core::graph::planted_instance;
use pcp_forge_core::rng;
use pcp_forge_core::stats::EstimatorConfig;
use pcp_forge_core::subspace_stats::{check_triplet_equivalence, mc_check_disjointness};
use rand::seq::SliceRandom;
use rand::Rng;
use std::process::ExitCode;

#[derive(clap::Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

macro_rules! check {
    ($failures:ident, $name:expr, $cond:expr) => {{
        let ok = $cond;
        println!("verify: {:<44} {}", $name, if ok { "PASS" } else { "FAIL" });
        if !ok {
            $failures += 1;
        }
    }};
}

pub fn run(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let budget = Budget::default();
    let seed = args.seed;
    let mut failures = 0usize;

    // field + subspace statistics
    let f2 = Field::new(2)?;
    check!(
        failures,
        "field inverses (GF(16))",
        (1..16).all(|a| {
            let f = Field::new(16).unwrap();
            f.mul(a, f.inv(a).unwrap()) == 1
        })
    );
    check!(
        failures,
        "random-subspace disjointness bound",
        mc_check_disjointness(&f2, 1, 5, EstimatorConfig::new(20_000, seed).with_workers(args.workers))?.pass
    );
    check!(
        failures,
        "triplet distribution equivalence (TV = 0)",
        check_triplet_equivalence(&f2, 1, 2, 3, &budget)?.is_zero()
    );

    // routing
    let mut ok = true;
    let mut r = rng::stream(seed, 1);
    for (lambda, m) in [(2usize, 3usize), (3, 2)] {
        let db = DeBruijn::new(lambda, m);
        for _ in 0..5 {
            let mut mu: Vec<usize> = (0..db.vertex_count()).collect();
            mu.shuffle(&mut r);
            let paths = route_permutation(&db, &mu)?;
            ok &= paths.verify().is_ok();
        }
    }
    check!(failures, "permutation routing invariants", ok);

    check!(
        failures,
        "de Bruijn linear structure (m <= 3)",
        (1..=3).all(|m| check_debruijn_linear_structure(&f2, m, &budget)
            .map(|r| r.is_linear())
            .unwrap_or(false))
    );

    // embedding completeness
    let mut r = rng::stream(seed, 2);
    let (g, pi) = planted_instance(6, 9, 2, 1, &mut r);
    let embedded = embed(&g, 2, 5, seed, 8, 0.9)?;
    check!(
        failures,
        "embedding completeness (lifted sat = 1)",
        embedded.eval_sat(&embedded.lift(&pi)) == 1.0
    );

    // direct-product tests
    let cfg = EstimatorConfig::new(2_000, seed).with_workers(args.workers);
    let mut r = rng::stream(seed, 3);
    let pi: Vec<u64> = (0..16).map(|_| r.gen_range(0..2)).collect();
    check!(
        failures,
        "honest nested-subspace test acceptance",
        estimate_acceptance(&f2, DpKind::P, &encode_p(pi.clone()), 1, 2, 4, cfg).estimate == 1.0
    );
    check!(
        failures,
        "honest disjoint-pair test acceptance",
        estimate_acceptance(&f2, DpKind::S, &encode_s(pi.clone()), 1, 2, 4, cfg).estimate == 1.0
    );
    check!(
        failures,
        "honest independent-pair test acceptance",
        estimate_acceptance(&f2, DpKind::P2, &encode_p2(pi.clone(), pi.clone()), 1, 2, 4, cfg)
            .estimate
            == 1.0
    );

    // product repetition
    let linear = random_planted_linear_graph(2, 4, 5, 2, seed)?;
    let honest = lift_assignment(linear.planted_assignment().unwrap());
    check!(
        failures,
        "product test honest acceptance",
        estimate_product_sat(&linear, 1, 2, &honest, cfg).estimate == 1.0
    );

    // decoding chain
    let mut r = rng::stream(seed, 4);
    let (phi, witness) = random_satisfiable_circuit(2, 1, 8, &mut r, &budget)?;
    let decoder = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
    let built = udpcp_to_vertex_decoding_graph(decoder, phi, 2, 1.0, seed)?;
    let honest_labels = built.honest_assignment(&witness);
    let appd_ok = eval_decoding(&built.graph, &honest_labels, &witness)? == (0.0, 0.0)
        && smoothness(&built.graph)? == 1.0;
    check!(failures, "decoder graph completeness + smoothness", appd_ok);
    let pipeline = embed_decoding(&built.graph, 16, 2, 2, 1.0, seed)?;
    let emb_labels = pipeline.embedded.lift_assignment(
        &pipeline
            .padded
            .lift_assignment(&pipeline.reduced.lift_assignment(&built.graph, &honest_labels)),
    );
    check!(
        failures,
        "decoding pipeline completeness",
        eval_decoding(&pipeline.embedded.graph, &emb_labels, &witness)? == (0.0, 0.0)
    );

    if failures == 0 {
        println!("verify: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: {failures} check(s) failed");
        Ok(ExitCode::from(4))
    }
}
